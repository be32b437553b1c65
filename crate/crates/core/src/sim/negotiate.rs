use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::geom::Vec2;

/// Where a robot is and where it would like to be after this step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveIntent {
    pub id: usize,
    pub energy: f64,
    pub current: Vec2,
    pub proposed: Vec2,
}

impl MoveIntent {
    pub fn is_moving(&self) -> bool {
        self.current != self.proposed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub id: usize,
    pub position: Vec2,
    /// The robot wanted to move but was told to hold.
    pub held: bool,
}

/// Higher remaining energy first, then lower id.
pub fn priority_order(a: &MoveIntent, b: &MoveIntent) -> Ordering {
    b.energy.total_cmp(&a.energy).then(a.id.cmp(&b.id))
}

/// Resolves movement conflicts by priority. Two final positions closer than
/// `safety_radius` conflict; the lower-priority mover holds (or the higher
/// one, if the lower is not moving). Held robots are then released again in
/// priority order whenever their move has become conflict-free. Output is in
/// input order.
///
/// Robots that already stand within the safety radius of each other and do
/// not move cannot be separated by holding; such pairs are left as they are.
pub fn negotiate_conflicts(intents: &[MoveIntent], safety_radius: f64) -> Vec<Resolution> {
    let mut order: Vec<usize> = (0..intents.len()).collect();
    order.sort_by(|&a, &b| priority_order(&intents[a], &intents[b]));

    let mut held = vec![false; intents.len()];
    let finals = |held: &[bool]| -> Vec<Vec2> {
        intents
            .iter()
            .zip(held)
            .map(|(m, &h)| if h { m.current } else { m.proposed })
            .collect()
    };
    let conflict = |a: Vec2, b: Vec2| a.dist(b) < safety_radius;

    'resolve: loop {
        let pos = finals(&held);
        for (rank, &hi) in order.iter().enumerate() {
            for &lo in &order[rank + 1..] {
                if !conflict(pos[hi], pos[lo]) {
                    continue;
                }
                let lo_moves = intents[lo].is_moving() && !held[lo];
                let hi_moves = intents[hi].is_moving() && !held[hi];
                if lo_moves {
                    held[lo] = true;
                    continue 'resolve;
                }
                if hi_moves {
                    held[hi] = true;
                    continue 'resolve;
                }
            }
        }
        break;
    }

    loop {
        let mut released = false;
        for &i in &order {
            if !held[i] {
                continue;
            }
            let pos = finals(&held);
            let clear = (0..intents.len()).all(|j| j == i || !conflict(intents[i].proposed, pos[j]));
            if clear {
                held[i] = false;
                released = true;
            }
        }
        if !released {
            break;
        }
    }

    let pos = finals(&held);
    intents
        .iter()
        .enumerate()
        .map(|(i, m)| Resolution {
            id: m.id,
            position: pos[i],
            held: held[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intent(id: usize, energy: f64, from: (f64, f64), to: (f64, f64)) -> MoveIntent {
        MoveIntent {
            id,
            energy,
            current: Vec2::new(from.0, from.1),
            proposed: Vec2::new(to.0, to.1),
        }
    }

    #[test]
    fn higher_energy_wins_same_target() {
        let out = negotiate_conflicts(
            &[intent(0, 60.0, (-1.0, 0.0), (0.0, 0.0)), intent(1, 80.0, (1.0, 0.0), (0.0, 0.0))],
            0.5,
        );
        assert!(out[0].held);
        assert_eq!(out[0].position, Vec2::new(-1.0, 0.0));
        assert!(!out[1].held);
        assert_eq!(out[1].position, Vec2::new(0.0, 0.0));
    }

    #[test]
    fn equal_energy_lower_id_wins() {
        let out = negotiate_conflicts(
            &[intent(4, 50.0, (-1.0, 0.0), (0.0, 0.0)), intent(2, 50.0, (1.0, 0.0), (0.0, 0.0))],
            0.5,
        );
        assert!(out[0].held);
        assert!(!out[1].held);
    }

    #[test]
    fn no_conflict_is_unchanged() {
        let intents = [intent(0, 10.0, (0.0, 0.0), (1.0, 0.0)), intent(1, 90.0, (0.0, 5.0), (1.0, 5.0))];
        let out = negotiate_conflicts(&intents, 1.0);
        for (m, r) in intents.iter().zip(&out) {
            assert!(!r.held);
            assert_eq!(r.position, m.proposed);
        }
    }

    #[test]
    fn moving_into_a_standing_robot_holds_the_mover() {
        let out = negotiate_conflicts(
            &[intent(0, 90.0, (0.0, 0.0), (1.0, 0.0)), intent(1, 10.0, (1.2, 0.0), (1.2, 0.0))],
            0.5,
        );
        assert!(out[0].held);
        assert!(!out[1].held);
    }

    #[test]
    fn withdrawn_blocker_releases_follower() {
        // 1 is held against 0's proposal, then 0 is held against 1's current
        // position; with 0 standing still, 1's move is clear again.
        let out = negotiate_conflicts(
            &[intent(0, 90.0, (0.0, 0.0), (1.0, 0.0)), intent(1, 10.0, (1.5, 0.5), (1.2, 0.0))],
            1.0,
        );
        assert!(out[0].held);
        assert!(!out[1].held);
        assert_eq!(out[1].position, Vec2::new(1.2, 0.0));
    }
}
