//! Scenario files: TOML documents describing one simulated rescue mission.
//!
//! Omitted fields fall back to the reproduction defaults (300 s missions,
//! charge below 30 % for 10 s, carriers 0.045 %/step with capacity 8,
//! observers 0.015 %/step with capacity 1 and whole-map sensing, carriers at
//! a tenth of the observer speed). See `scenarios/*.toml` for complete
//! examples and the README for the full schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::RobotClass;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub duration_s: f64,
    pub dt_s: f64,
    /// Carriers and observers share perception and adapt speeds when true.
    pub cooperative: bool,
    /// Handling time at the rescue site per round, seconds.
    pub rescue_time_s: f64,
    pub world: WorldLayout,
    pub obstacles: ObstacleBlock,
    pub victims: VictimsMode,
    pub team: Vec<ClassSpec>,
    pub cooperation: CooperationEffect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorldLayout {
    pub shelter: Point,
    pub rescue_site: Point,
    pub charge_station: Point,
    /// Distance between neighbouring robot slots at each site.
    pub slot_spacing: f64,
    /// Spawn jitter radius around each robot's shelter slot.
    pub start_radius: f64,
    /// Two robots closer than this are in conflict.
    pub safety_radius: f64,
    /// Distance covered by one moving step for energy accounting.
    pub step_length: f64,
    /// Held this long by negotiation, a robot with a close neighbour evades.
    pub evade_after_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstacleBlock {
    pub count: u32,
    pub radius: f64,
    /// Encounter-rate coefficient of the closed-form model.
    pub rate_coefficient: f64,
    pub tackle_time_s: f64,
    pub tackle_energy: f64,
    /// Placement rectangle `[min, max]`; defaults to the sites' bounding box
    /// grown by `region_margin`.
    pub region: [Point; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum VictimsMode {
    Ample,
    Bounded { count: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSpec {
    pub class: RobotClass,
    pub count: u32,
    pub velocity: f64,
    #[serde(with = "crate::serde_inf")]
    pub sense_range: f64,
    /// Percent of battery per moving step.
    pub energy_per_step: f64,
    pub capacity: u32,
    pub charge_threshold: f64,
    pub charge_duration_s: f64,
}

/// Speed multipliers applied at world build for cooperative mixed teams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CooperationEffect {
    pub carrier_speed_factor: f64,
    pub observer_speed_factor: f64,
}

impl Default for CooperationEffect {
    fn default() -> Self {
        CooperationEffect {
            carrier_speed_factor: 2.0,
            observer_speed_factor: 0.5,
        }
    }
}

pub const DEFAULT_DURATION_S: f64 = 300.0;
pub const DEFAULT_DT_S: f64 = 0.1;
pub const DEFAULT_CHARGE_THRESHOLD: f64 = 30.0;
pub const DEFAULT_CHARGE_DURATION_S: f64 = 10.0;
pub const DEFAULT_RESCUE_TIME_S: f64 = 1.0;
pub const DEFAULT_OBSERVER_SPEED: f64 = 10.0;

impl ClassSpec {
    /// Reproduction defaults for a class with the given head count.
    pub fn default_for(class: RobotClass, count: u32) -> Self {
        let (velocity, sense_range, energy_per_step, capacity) = match class {
            RobotClass::Carrier => (DEFAULT_OBSERVER_SPEED / 10.0, 10.0, 0.045, 8),
            RobotClass::Supplier => (DEFAULT_OBSERVER_SPEED / 10.0, 10.0, 0.045, 2),
            RobotClass::Observer => (DEFAULT_OBSERVER_SPEED, f64::INFINITY, 0.015, 1),
        };
        ClassSpec {
            class,
            count,
            velocity,
            sense_range,
            energy_per_step,
            capacity,
            charge_threshold: DEFAULT_CHARGE_THRESHOLD,
            charge_duration_s: DEFAULT_CHARGE_DURATION_S,
        }
    }
}

impl Scenario {
    pub fn team_size(&self) -> u32 {
        self.team.iter().map(|c| c.count).sum()
    }

    pub fn class_count(&self, class: RobotClass) -> u32 {
        self.team.iter().filter(|c| c.class == class).map(|c| c.count).sum()
    }

    /// Slot offset of robot `index` in a team of `size`, perpendicular to the
    /// shelter–site axis.
    pub fn slot_offset(&self, index: usize, size: usize) -> Point {
        let [sx, sy] = self.world.shelter;
        let [rx, ry] = self.world.rescue_site;
        let (dx, dy) = (rx - sx, ry - sy);
        let len = (dx * dx + dy * dy).sqrt();
        let (nx, ny) = if len > 0.0 { (-dy / len, dx / len) } else { (0.0, 1.0) };
        let k = (index as f64 - (size as f64 - 1.0) / 2.0) * self.world.slot_spacing;
        [nx * k, ny * k]
    }

    pub fn slots(&self, site: Point) -> Vec<Point> {
        let n = self.team_size() as usize;
        (0..n)
            .map(|i| {
                let [ox, oy] = self.slot_offset(i, n);
                [site[0] + ox, site[1] + oy]
            })
            .collect()
    }

    /// Range checks; `origin` labels diagnostics (usually the file path).
    pub fn validate(&self, origin: &str) -> Result<(), ScenarioError> {
        let range = |field: &str, reason: String| ScenarioError::Range {
            origin: origin.to_string(),
            field: field.to_string(),
            reason,
        };
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(range(field, format!("must be finite and > 0, got {v}")))
            }
        };
        let non_negative = |field: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(range(field, format!("must be finite and >= 0, got {v}")))
            }
        };
        let percent = |field: &str, v: f64| {
            if (0.0..=100.0).contains(&v) {
                Ok(())
            } else {
                Err(range(field, format!("must lie in [0, 100], got {v}")))
            }
        };

        if self.name.trim().is_empty() {
            return Err(range("name", "must not be empty".into()));
        }
        positive("duration_s", self.duration_s)?;
        positive("dt_s", self.dt_s)?;
        if self.dt_s > self.duration_s {
            return Err(range("dt_s", format!("exceeds duration_s ({} > {})", self.dt_s, self.duration_s)));
        }
        non_negative("rescue_time_s", self.rescue_time_s)?;

        let w = &self.world;
        for (field, p) in [
            ("world.shelter", w.shelter),
            ("world.rescue_site", w.rescue_site),
            ("world.charge_station", w.charge_station),
        ] {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(range(field, format!("coordinates must be finite, got {p:?}")));
            }
        }
        positive("world.safety_radius", w.safety_radius)?;
        positive("world.step_length", w.step_length)?;
        non_negative("world.evade_after_s", w.evade_after_s)?;
        non_negative("world.start_radius", w.start_radius)?;
        if !(w.slot_spacing.is_finite() && w.slot_spacing >= w.safety_radius) {
            return Err(range(
                "world.slot_spacing",
                format!("must be >= safety_radius ({}), got {}", w.safety_radius, w.slot_spacing),
            ));
        }
        let max_jitter = (w.slot_spacing - w.safety_radius) / 2.0;
        if w.start_radius > max_jitter {
            return Err(range(
                "world.start_radius",
                format!("must be <= (slot_spacing - safety_radius)/2 = {max_jitter}, got {}", w.start_radius),
            ));
        }

        let o = &self.obstacles;
        positive("obstacles.radius", o.radius)?;
        positive("obstacles.rate_coefficient", o.rate_coefficient)?;
        non_negative("obstacles.tackle_time_s", o.tackle_time_s)?;
        percent("obstacles.tackle_energy", o.tackle_energy)?;
        let [lo, hi] = o.region;
        if !(lo.iter().chain(hi.iter()).all(|c| c.is_finite()) && lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(range("obstacles.region", format!("must be [[xmin, ymin], [xmax, ymax]] with min < max, got {:?}", o.region)));
        }

        if self.team.is_empty() || self.team_size() == 0 {
            return Err(range("team", "needs at least one robot".into()));
        }
        for (i, spec) in self.team.iter().enumerate() {
            let f = |name: &str| format!("team[{i}].{name}");
            if self.team[..i].iter().any(|s| s.class == spec.class) {
                return Err(range(&f("class"), format!("class `{}` listed twice", spec.class)));
            }
            positive(&f("velocity"), spec.velocity)?;
            if spec.sense_range.is_nan() || spec.sense_range <= 0.0 {
                return Err(range(&f("sense_range"), format!("must be > 0 or inf, got {}", spec.sense_range)));
            }
            percent(&f("energy_per_step"), spec.energy_per_step)?;
            if !(0.0..100.0).contains(&spec.charge_threshold) {
                return Err(range(&f("charge_threshold"), format!("must lie in [0, 100), got {}", spec.charge_threshold)));
            }
            non_negative(&f("charge_duration_s"), spec.charge_duration_s)?;
        }

        positive("cooperation.carrier_speed_factor", self.cooperation.carrier_speed_factor)?;
        positive("cooperation.observer_speed_factor", self.cooperation.observer_speed_factor)?;

        self.check_site_overlap().map_err(|reason| range("world", reason))
    }

    /// Slots of different sites must keep twice the safety radius apart.
    pub fn check_site_overlap(&self) -> Result<(), String> {
        let w = &self.world;
        let sites = [
            ("shelter", w.shelter),
            ("rescue_site", w.rescue_site),
            ("charge_station", w.charge_station),
        ];
        let min_gap = 2.0 * w.safety_radius;
        for (i, (name_a, a)) in sites.iter().enumerate() {
            for (name_b, b) in &sites[i + 1..] {
                let gap = self
                    .slots(*a)
                    .iter()
                    .flat_map(|p| self.slots(*b).into_iter().map(move |q| dist(*p, q)))
                    .fold(f64::INFINITY, f64::min);
                if gap < min_gap {
                    return Err(format!(
                        "{name_a} and {name_b} overlap: closest slots {gap:.3} apart, need >= {min_gap:.3}"
                    ));
                }
            }
        }
        Ok(())
    }
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

// ---- file format ---------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    duration_s: Option<f64>,
    dt_s: Option<f64>,
    #[serde(default)]
    cooperative: bool,
    rescue_time_s: Option<f64>,
    world: RawWorld,
    #[serde(default)]
    obstacles: RawObstacles,
    #[serde(default)]
    victims: RawVictims,
    team: Vec<RawClass>,
    #[serde(default)]
    cooperation: RawCooperation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorld {
    shelter: Point,
    rescue_site: Point,
    charge_station: Point,
    slot_spacing: Option<f64>,
    start_radius: Option<f64>,
    safety_radius: Option<f64>,
    step_length: Option<f64>,
    evade_after_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacles {
    count: Option<u32>,
    radius: Option<f64>,
    rate_coefficient: Option<f64>,
    tackle_time_s: Option<f64>,
    tackle_energy: Option<f64>,
    region: Option<[Point; 2]>,
    region_margin: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVictims {
    mode: Option<String>,
    count: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    class: RobotClass,
    count: u32,
    velocity: Option<f64>,
    #[serde(default, deserialize_with = "opt_inf")]
    sense_range: Option<f64>,
    energy_per_step: Option<f64>,
    capacity: Option<u32>,
    charge_threshold: Option<f64>,
    charge_duration_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCooperation {
    carrier_speed_factor: Option<f64>,
    observer_speed_factor: Option<f64>,
}

fn opt_inf<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    crate::serde_inf::deserialize(d).map(Some)
}

pub const DEFAULT_SLOT_SPACING: f64 = 2.5;
pub const DEFAULT_SAFETY_RADIUS: f64 = 1.0;
pub const DEFAULT_START_RADIUS: f64 = 0.5;
pub const DEFAULT_STEP_LENGTH: f64 = 0.5;
pub const DEFAULT_EVADE_AFTER_S: f64 = 1.0;
pub const DEFAULT_REGION_MARGIN: f64 = 5.0;

impl RawScenario {
    fn resolve(self, origin: &str) -> Result<Scenario, ScenarioError> {
        let world = WorldLayout {
            shelter: self.world.shelter,
            rescue_site: self.world.rescue_site,
            charge_station: self.world.charge_station,
            slot_spacing: self.world.slot_spacing.unwrap_or(DEFAULT_SLOT_SPACING),
            start_radius: self.world.start_radius.unwrap_or(DEFAULT_START_RADIUS),
            safety_radius: self.world.safety_radius.unwrap_or(DEFAULT_SAFETY_RADIUS),
            step_length: self.world.step_length.unwrap_or(DEFAULT_STEP_LENGTH),
            evade_after_s: self.world.evade_after_s.unwrap_or(DEFAULT_EVADE_AFTER_S),
        };
        let margin = self.obstacles.region_margin.unwrap_or(DEFAULT_REGION_MARGIN);
        let region = self.obstacles.region.unwrap_or_else(|| {
            let pts = [world.shelter, world.rescue_site, world.charge_station];
            let min = |k: usize| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - margin;
            let max = |k: usize| pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + margin;
            [[min(0), min(1)], [max(0), max(1)]]
        });
        let obstacles = ObstacleBlock {
            count: self.obstacles.count.unwrap_or(0),
            radius: self.obstacles.radius.unwrap_or(1.5),
            rate_coefficient: self.obstacles.rate_coefficient.unwrap_or(1.0),
            tackle_time_s: self.obstacles.tackle_time_s.unwrap_or(2.0),
            tackle_energy: self.obstacles.tackle_energy.unwrap_or(0.5),
            region,
        };
        let victims = match (self.victims.mode.as_deref(), self.victims.count) {
            (None | Some("ample"), None) => VictimsMode::Ample,
            (None | Some("bounded"), Some(count)) => VictimsMode::Bounded { count },
            (Some("bounded"), None) => {
                return Err(ScenarioError::Range {
                    origin: origin.into(),
                    field: "victims.count".into(),
                    reason: "required when mode = \"bounded\"".into(),
                })
            }
            (Some("ample"), Some(_)) => {
                return Err(ScenarioError::Range {
                    origin: origin.into(),
                    field: "victims.count".into(),
                    reason: "not allowed when mode = \"ample\"".into(),
                })
            }
            (Some(other), _) => {
                return Err(ScenarioError::Range {
                    origin: origin.into(),
                    field: "victims.mode".into(),
                    reason: format!("expected \"ample\" or \"bounded\", got \"{other}\""),
                })
            }
        };
        let team = self
            .team
            .into_iter()
            .map(|raw| {
                let d = ClassSpec::default_for(raw.class, raw.count);
                ClassSpec {
                    class: raw.class,
                    count: raw.count,
                    velocity: raw.velocity.unwrap_or(d.velocity),
                    sense_range: raw.sense_range.unwrap_or(d.sense_range),
                    energy_per_step: raw.energy_per_step.unwrap_or(d.energy_per_step),
                    capacity: raw.capacity.unwrap_or(d.capacity),
                    charge_threshold: raw.charge_threshold.unwrap_or(d.charge_threshold),
                    charge_duration_s: raw.charge_duration_s.unwrap_or(d.charge_duration_s),
                }
            })
            .collect();
        let defaults = CooperationEffect::default();
        let scenario = Scenario {
            name: self.name,
            duration_s: self.duration_s.unwrap_or(DEFAULT_DURATION_S),
            dt_s: self.dt_s.unwrap_or(DEFAULT_DT_S),
            cooperative: self.cooperative,
            rescue_time_s: self.rescue_time_s.unwrap_or(DEFAULT_RESCUE_TIME_S),
            world,
            obstacles,
            victims,
            team,
            cooperation: CooperationEffect {
                carrier_speed_factor: self.cooperation.carrier_speed_factor.unwrap_or(defaults.carrier_speed_factor),
                observer_speed_factor: self.cooperation.observer_speed_factor.unwrap_or(defaults.observer_speed_factor),
            },
        };
        scenario.validate(origin)?;
        Ok(scenario)
    }
}

/// Parses and validates scenario text; `origin` names the source in diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    raw.resolve(origin)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// The four reproduction scenarios as shipped text: (file name, contents).
pub const BUILTIN_SCENARIOS: [(&str, &str); 4] = [
    ("sc1_homogeneous_carriers.toml", include_str!("../../scenarios/sc1_homogeneous_carriers.toml")),
    ("sc2_homogeneous_observers.toml", include_str!("../../scenarios/sc2_homogeneous_observers.toml")),
    ("sc3_heterogeneous_noncoop.toml", include_str!("../../scenarios/sc3_heterogeneous_noncoop.toml")),
    ("sc4_heterogeneous_coop.toml", include_str!("../../scenarios/sc4_heterogeneous_coop.toml")),
];

pub fn builtin_scenarios() -> Vec<Scenario> {
    BUILTIN_SCENARIOS
        .iter()
        .map(|(file, text)| parse_scenario(text, file).expect("shipped scenario must parse"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "mini"
[world]
shelter = [0.0, 0.0]
rescue_site = [30.0, 0.0]
charge_station = [-10.0, 0.0]
[[team]]
class = "carrier"
count = 2
"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let s = parse_scenario(MINIMAL, "mini.toml").unwrap();
        assert_eq!(s.duration_s, 300.0);
        assert_eq!(s.dt_s, 0.1);
        assert_eq!(s.team[0].charge_threshold, 30.0);
        assert_eq!(s.team[0].charge_duration_s, 10.0);
        assert_eq!(s.team[0].capacity, 8);
        assert_eq!(s.team[0].energy_per_step, 0.045);
        assert_eq!(s.victims, VictimsMode::Ample);
        assert_eq!(s.obstacles.count, 0);
    }

    #[test]
    fn zero_dt_names_the_field() {
        let text = MINIMAL.replace("name = \"mini\"", "name = \"mini\"\ndt_s = 0.0");
        let err = parse_scenario(&text, "mini.toml").unwrap_err();
        match err {
            ScenarioError::Range { field, .. } => assert_eq!(field, "dt_s"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_reported_with_location() {
        let text = MINIMAL.replace("count = 2", "count = 2\nwings = 4");
        let msg = parse_scenario(&text, "mini.toml").unwrap_err().to_string();
        assert!(msg.contains("wings"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn malformed_syntax_is_a_parse_error() {
        let err = parse_scenario("name = ", "bad.toml").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { .. }));
    }

    #[test]
    fn infinite_sense_range_literal() {
        let text = MINIMAL.replace("count = 2", "count = 2\nsense_range = inf");
        assert!(parse_scenario(&text, "m").unwrap().team[0].sense_range.is_infinite());
        let text = MINIMAL.replace("count = 2", "count = 2\nsense_range = \"inf\"");
        assert!(parse_scenario(&text, "m").unwrap().team[0].sense_range.is_infinite());
    }

    #[test]
    fn overlapping_sites_rejected() {
        let text = MINIMAL.replace("charge_station = [-10.0, 0.0]", "charge_station = [0.5, 0.0]");
        let err = parse_scenario(&text, "m").unwrap_err();
        assert!(matches!(err, ScenarioError::Range { ref field, .. } if field == "world"), "{err}");
    }

    #[test]
    fn bounded_victims() {
        let text = format!("{MINIMAL}\n[victims]\nmode = \"bounded\"\ncount = 40\n");
        assert_eq!(parse_scenario(&text, "m").unwrap().victims, VictimsMode::Bounded { count: 40 });
        let text = format!("{MINIMAL}\n[victims]\nmode = \"bounded\"\n");
        assert!(parse_scenario(&text, "m").is_err());
    }

    #[test]
    fn duplicate_class_rejected() {
        let text = format!("{MINIMAL}\n[[team]]\nclass = \"carrier\"\ncount = 1\n");
        assert!(parse_scenario(&text, "m").is_err());
    }

    #[test]
    fn builtins_parse() {
        let all = builtin_scenarios();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|s| s.team_size() == 6));
    }
}
