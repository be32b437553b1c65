//! Shared domain types: robot classes, capability profiles, team
//! compositions and mission parameters, plus the aggregate arithmetic the
//! analytic engine and the optimizer build on.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobotClass {
    Carrier,
    Supplier,
    Observer,
}

impl RobotClass {
    pub const ALL: [RobotClass; 3] = [RobotClass::Carrier, RobotClass::Supplier, RobotClass::Observer];

    pub fn as_str(self) -> &'static str {
        match self {
            RobotClass::Carrier => "carrier",
            RobotClass::Supplier => "supplier",
            RobotClass::Observer => "observer",
        }
    }
}

impl fmt::Display for RobotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-class capability vector.
///
/// `sen` may be `f64::INFINITY` to mark whole-map perception; serialized
/// forms write it as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilityProfile {
    /// Maximum velocity, distance units per second.
    pub v: f64,
    /// Communication radius.
    pub com: f64,
    /// Sensing radius, possibly infinite.
    #[serde(with = "crate::serde_inf")]
    pub sen: f64,
    /// Energy level, percent.
    pub eng: f64,
    /// Rescue resource stock, units.
    pub res: f64,
    /// Carrying capacity per round, units.
    pub cap: f64,
}

impl CapabilityProfile {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.v.is_finite() && self.v > 0.0) {
            return Err(ModelError::invalid("v", format!("must be finite and > 0, got {}", self.v)));
        }
        for (field, value) in [("com", self.com), ("res", self.res), ("cap", self.cap)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::invalid(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.sen.is_nan() || self.sen <= 0.0 {
            return Err(ModelError::invalid("sen", format!("must be > 0 or +inf, got {}", self.sen)));
        }
        if !(0.0..=100.0).contains(&self.eng) {
            return Err(ModelError::invalid("eng", format!("must lie in [0, 100], got {}", self.eng)));
        }
        Ok(())
    }
}

/// Built-in capability profile for a class.
///
/// Capacities follow the reproduction setup (carriers move eight units per
/// round, observers one), observers perceive the whole map, and the
/// remaining magnitudes are picked so that [`check_dominance`] passes under
/// [`DominanceConfig::default`].
pub fn default_profile(class: RobotClass) -> CapabilityProfile {
    match class {
        RobotClass::Carrier => CapabilityProfile {
            v: 1.0,
            com: 20.0,
            sen: 10.0,
            eng: 100.0,
            res: 2.0,
            cap: 8.0,
        },
        RobotClass::Supplier => CapabilityProfile {
            v: 1.0,
            com: 20.0,
            sen: 10.0,
            eng: 90.0,
            res: 100.0,
            cap: 2.0,
        },
        RobotClass::Observer => CapabilityProfile {
            v: 10.0,
            com: 200.0,
            sen: f64::INFINITY,
            eng: 20.0,
            res: 1.0,
            cap: 1.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSet {
    pub carrier: CapabilityProfile,
    pub supplier: CapabilityProfile,
    pub observer: CapabilityProfile,
}

impl Default for ProfileSet {
    fn default() -> Self {
        ProfileSet {
            carrier: default_profile(RobotClass::Carrier),
            supplier: default_profile(RobotClass::Supplier),
            observer: default_profile(RobotClass::Observer),
        }
    }
}

impl ProfileSet {
    pub fn get(&self, class: RobotClass) -> &CapabilityProfile {
        match class {
            RobotClass::Carrier => &self.carrier,
            RobotClass::Supplier => &self.supplier,
            RobotClass::Observer => &self.observer,
        }
    }

    pub fn get_mut(&mut self, class: RobotClass) -> &mut CapabilityProfile {
        match class {
            RobotClass::Carrier => &mut self.carrier,
            RobotClass::Supplier => &mut self.supplier,
            RobotClass::Observer => &mut self.observer,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        RobotClass::ALL.iter().try_for_each(|&c| self.get(c).validate())
    }
}

/// Quantifies the informal "much greater" and "approximately equal"
/// relations between class capabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceConfig {
    /// `a ≫ b` holds when `a >= much_greater * b`.
    pub much_greater: f64,
    /// `a ≈ b` holds when `a / b` lies in `[approx_low, approx_high]`.
    pub approx_low: f64,
    pub approx_high: f64,
}

impl Default for DominanceConfig {
    fn default() -> Self {
        DominanceConfig {
            much_greater: 4.0,
            approx_low: 0.5,
            approx_high: 2.0,
        }
    }
}

impl DominanceConfig {
    fn much_greater(&self, a: f64, b: f64) -> bool {
        a >= self.much_greater * b
    }

    fn approx(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        if b == 0.0 {
            return false;
        }
        let ratio = a / b;
        ratio >= self.approx_low && ratio <= self.approx_high
    }
}

/// The six capability relations that encode each class's specialty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    /// com_o ≫ com_s ≈ com_c
    Communication,
    /// sen_o ≫ sen_s ≈ sen_c
    Sensing,
    /// v_o > v_s ≈ v_c
    Velocity,
    /// eng_c > eng_s ≫ eng_o
    Energy,
    /// res_s ≫ res_c > res_o
    Resources,
    /// cap_c ≫ cap_s > cap_o
    Capacity,
}

impl DominanceRelation {
    pub fn describe(self) -> &'static str {
        match self {
            DominanceRelation::Communication => "com_o >> com_s ~ com_c",
            DominanceRelation::Sensing => "sen_o >> sen_s ~ sen_c",
            DominanceRelation::Velocity => "v_o > v_s ~ v_c",
            DominanceRelation::Energy => "eng_c > eng_s >> eng_o",
            DominanceRelation::Resources => "res_s >> res_c > res_o",
            DominanceRelation::Capacity => "cap_c >> cap_s > cap_o",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceViolation {
    pub relation: DominanceRelation,
    /// The individual comparisons that failed.
    pub failed: Vec<String>,
}

impl fmt::Display for DominanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated: {}", self.relation.describe(), self.failed.join("; "))
    }
}

/// Checks the class-dominance relations. An empty result means every relation
/// holds; each violated relation contributes exactly one descriptor.
pub fn check_dominance(profiles: &ProfileSet, config: &DominanceConfig) -> Vec<DominanceViolation> {
    let (c, s, o) = (&profiles.carrier, &profiles.supplier, &profiles.observer);
    let mut out = Vec::new();
    let mut check = |relation: DominanceRelation, tests: &[(bool, String)]| {
        let failed: Vec<String> = tests.iter().filter(|(ok, _)| !ok).map(|(_, d)| d.clone()).collect();
        if !failed.is_empty() {
            out.push(DominanceViolation { relation, failed });
        }
    };

    check(
        DominanceRelation::Communication,
        &[
            (config.much_greater(o.com, s.com), format!("com_o={} >> com_s={}", o.com, s.com)),
            (config.much_greater(o.com, c.com), format!("com_o={} >> com_c={}", o.com, c.com)),
            (config.approx(s.com, c.com), format!("com_s={} ~ com_c={}", s.com, c.com)),
        ],
    );
    check(
        DominanceRelation::Sensing,
        &[
            (config.much_greater(o.sen, s.sen) && o.sen > s.sen, format!("sen_o={} >> sen_s={}", o.sen, s.sen)),
            (config.much_greater(o.sen, c.sen) && o.sen > c.sen, format!("sen_o={} >> sen_c={}", o.sen, c.sen)),
            (config.approx(s.sen, c.sen), format!("sen_s={} ~ sen_c={}", s.sen, c.sen)),
        ],
    );
    check(
        DominanceRelation::Velocity,
        &[
            (o.v > s.v, format!("v_o={} > v_s={}", o.v, s.v)),
            (o.v > c.v, format!("v_o={} > v_c={}", o.v, c.v)),
            (config.approx(s.v, c.v), format!("v_s={} ~ v_c={}", s.v, c.v)),
        ],
    );
    check(
        DominanceRelation::Energy,
        &[
            (c.eng > s.eng, format!("eng_c={} > eng_s={}", c.eng, s.eng)),
            (config.much_greater(s.eng, o.eng) && s.eng > o.eng, format!("eng_s={} >> eng_o={}", s.eng, o.eng)),
        ],
    );
    check(
        DominanceRelation::Resources,
        &[
            (config.much_greater(s.res, c.res) && s.res > c.res, format!("res_s={} >> res_c={}", s.res, c.res)),
            (c.res > o.res, format!("res_c={} > res_o={}", c.res, o.res)),
        ],
    );
    check(
        DominanceRelation::Capacity,
        &[
            (config.much_greater(c.cap, s.cap) && c.cap > s.cap, format!("cap_c={} >> cap_s={}", c.cap, s.cap)),
            (s.cap > o.cap, format!("cap_s={} > cap_o={}", s.cap, o.cap)),
        ],
    );
    out
}

/// Counts of carriers (x), suppliers (y) and observers (z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct TeamComposition {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl TeamComposition {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        TeamComposition { x, y, z }
    }

    pub fn size(&self) -> u32 {
        self.x + self.y + self.z
    }

    pub fn count(&self, class: RobotClass) -> u32 {
        match class {
            RobotClass::Carrier => self.x,
            RobotClass::Supplier => self.y,
            RobotClass::Observer => self.z,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        RobotClass::ALL.iter().filter(|&&c| self.count(c) > 0).count() == 1
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.size() == 0 {
            Err(ModelError::EmptyComposition)
        } else {
            Ok(())
        }
    }
}

impl Add for TeamComposition {
    type Output = TeamComposition;

    fn add(self, rhs: Self) -> Self {
        TeamComposition::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl fmt::Display for TeamComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Mission and environment parameters for the closed-form model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSpec {
    /// Mission time budget, seconds.
    pub t_n: f64,
    /// Distance from the group's start to the rescue site.
    pub l: f64,
    /// Obstacle count.
    pub n: u32,
    /// Encounter-rate coefficient.
    pub c: f64,
    /// Time to tackle one obstacle, seconds.
    pub t_c: f64,
    /// Energy to tackle one obstacle, percent.
    pub e_c: f64,
    /// Travel energy per round, percent.
    pub e_t: f64,
    /// Required (capacity, resources) amounts; may be empty.
    #[serde(default)]
    pub requirement: Vec<f64>,
}

impl MissionSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [("t_n", self.t_n), ("l", self.l), ("c", self.c)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::invalid(field, format!("must be finite and > 0, got {value}")));
            }
        }
        for (field, value) in [("t_c", self.t_c), ("e_c", self.e_c), ("e_t", self.e_t)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::invalid(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if let Some(bad) = self.requirement.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ModelError::invalid("requirement", format!("components must be finite and >= 0, got {bad}")));
        }
        Ok(())
    }
}

/// Group-level capability totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateCapability {
    pub total_cap: f64,
    pub total_res: f64,
    #[serde(with = "crate::serde_inf")]
    pub total_sen: f64,
    /// Velocity of the slowest class present; the group moves at this speed.
    pub min_v: f64,
}

pub fn aggregate_capability(comp: &TeamComposition, profiles: &ProfileSet) -> Result<AggregateCapability, ModelError> {
    comp.validate()?;
    let mut agg = AggregateCapability {
        total_cap: 0.0,
        total_res: 0.0,
        total_sen: 0.0,
        min_v: f64::INFINITY,
    };
    for class in RobotClass::ALL {
        let count = comp.count(class);
        if count == 0 {
            continue;
        }
        let p = profiles.get(class);
        let k = f64::from(count);
        agg.total_cap += k * p.cap;
        agg.total_res += k * p.res;
        agg.total_sen += k * p.sen;
        agg.min_v = agg.min_v.min(p.v);
    }
    Ok(agg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ProfileSet {
        ProfileSet::default()
    }

    #[test]
    fn default_profiles_match_reproduction_values() {
        assert_eq!(default_profile(RobotClass::Carrier).cap, 8.0);
        let obs = default_profile(RobotClass::Observer);
        assert_eq!(obs.cap, 1.0);
        assert!(obs.sen.is_infinite() && obs.sen > 0.0);
        let sup = default_profile(RobotClass::Supplier);
        assert!(sup.res > sup.cap);
        assert_eq!(default_profile(RobotClass::Supplier), sup);
    }

    #[test]
    fn default_set_passes_dominance() {
        let set = defaults();
        set.validate().unwrap();
        assert_eq!(check_dominance(&set, &DominanceConfig::default()), vec![]);
    }

    #[test]
    fn equal_observer_and_carrier_speed_is_one_velocity_violation() {
        let mut set = defaults();
        set.observer.v = set.carrier.v;
        let v = check_dominance(&set, &DominanceConfig::default());
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].relation, DominanceRelation::Velocity);
    }

    #[test]
    fn identical_profiles_violate_every_relation() {
        let p = default_profile(RobotClass::Carrier);
        let set = ProfileSet { carrier: p, supplier: p, observer: p };
        let rels: Vec<_> = check_dominance(&set, &DominanceConfig::default()).iter().map(|v| v.relation).collect();
        assert_eq!(
            rels,
            vec![
                DominanceRelation::Communication,
                DominanceRelation::Sensing,
                DominanceRelation::Velocity,
                DominanceRelation::Energy,
                DominanceRelation::Resources,
                DominanceRelation::Capacity,
            ]
        );
    }

    #[test]
    fn aggregate_sums() {
        let set = defaults();
        let a = aggregate_capability(&TeamComposition::new(3, 0, 0), &set).unwrap();
        assert_eq!(a.total_cap, 24.0);

        let mut set2 = defaults();
        set2.carrier.cap = 40.0;
        set2.supplier.cap = 8.0;
        set2.carrier.res = 8.0;
        set2.supplier.res = 100.0;
        let a = aggregate_capability(&TeamComposition::new(2, 1, 0), &set2).unwrap();
        assert_eq!(a.total_cap, 2.0 * 40.0 + 8.0);
        assert_eq!(a.total_res, 2.0 * 8.0 + 100.0);
        assert_eq!((a.total_cap, a.total_res), (88.0, 116.0));

        let a = aggregate_capability(&TeamComposition::new(1, 0, 1), &set).unwrap();
        assert!(a.total_sen.is_infinite());
    }

    #[test]
    fn aggregate_min_velocity_ignores_absent_classes() {
        let set = defaults();
        let a = aggregate_capability(&TeamComposition::new(0, 0, 2), &set).unwrap();
        assert_eq!(a.min_v, 10.0);
        let a = aggregate_capability(&TeamComposition::new(1, 0, 2), &set).unwrap();
        assert_eq!(a.min_v, 1.0);
    }

    #[test]
    fn empty_composition_rejected() {
        assert_eq!(
            aggregate_capability(&TeamComposition::default(), &defaults()),
            Err(ModelError::EmptyComposition)
        );
    }

    #[test]
    fn profile_validation_catches_bad_fields() {
        let mut p = default_profile(RobotClass::Carrier);
        p.v = 0.0;
        assert!(p.validate().is_err());
        let mut p = default_profile(RobotClass::Carrier);
        p.eng = 120.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn infinite_sensing_round_trips_through_json() {
        let set = defaults();
        let json = serde_json::to_string(&set).unwrap();
        assert!(json.contains("\"inf\""));
        let back: ProfileSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
    }
}
