//! Mission files for the closed-form tools: a `[mission]` table, optional
//! per-class profile overrides under `[profiles.<class>]`, and any number of
//! named `[[composition]]` entries.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::{CapabilityProfile, MissionSpec, ProfileSet, TeamComposition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedComposition {
    pub name: String,
    pub composition: TeamComposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionFile {
    pub mission: MissionSpec,
    pub profiles: ProfileSet,
    pub compositions: Vec<NamedComposition>,
}

impl MissionFile {
    pub fn composition(&self, name: &str) -> Option<&NamedComposition> {
        self.compositions.iter().find(|c| c.name == name)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    mission: MissionSpec,
    #[serde(default)]
    profiles: RawProfiles,
    #[serde(default)]
    composition: Vec<RawComposition>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfiles {
    carrier: Option<RawProfile>,
    supplier: Option<RawProfile>,
    observer: Option<RawProfile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    v: Option<f64>,
    com: Option<f64>,
    #[serde(default, deserialize_with = "opt_inf")]
    sen: Option<f64>,
    eng: Option<f64>,
    res: Option<f64>,
    cap: Option<f64>,
}

fn opt_inf<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    crate::serde_inf::deserialize(d).map(Some)
}

impl RawProfile {
    fn over(self, base: CapabilityProfile) -> CapabilityProfile {
        CapabilityProfile {
            v: self.v.unwrap_or(base.v),
            com: self.com.unwrap_or(base.com),
            sen: self.sen.unwrap_or(base.sen),
            eng: self.eng.unwrap_or(base.eng),
            res: self.res.unwrap_or(base.res),
            cap: self.cap.unwrap_or(base.cap),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComposition {
    name: String,
    #[serde(default)]
    carrier: u32,
    #[serde(default)]
    supplier: u32,
    #[serde(default)]
    observer: u32,
}

pub fn parse_mission_file(text: &str, origin: &str) -> Result<MissionFile, ScenarioError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let range = |field: String, reason: String| ScenarioError::Range {
        origin: origin.to_string(),
        field,
        reason,
    };
    let model = |prefix: &str, e: crate::error::ModelError| match e {
        crate::error::ModelError::InvalidValue { field, reason } => range(format!("{prefix}{field}"), reason),
        other => range(prefix.trim_end_matches('.').to_string(), other.to_string()),
    };

    raw.mission.validate().map_err(|e| model("mission.", e))?;
    let mut profiles = ProfileSet::default();
    let RawProfiles {
        carrier,
        supplier,
        observer,
    } = raw.profiles;
    if let Some(p) = carrier {
        profiles.carrier = p.over(profiles.carrier);
    }
    if let Some(p) = supplier {
        profiles.supplier = p.over(profiles.supplier);
    }
    if let Some(p) = observer {
        profiles.observer = p.over(profiles.observer);
    }
    profiles.validate().map_err(|e| model("profiles.", e))?;

    let mut compositions: Vec<NamedComposition> = Vec::new();
    for (i, c) in raw.composition.into_iter().enumerate() {
        if compositions.iter().any(|o| o.name == c.name) {
            return Err(range(format!("composition[{i}].name"), format!("duplicate name `{}`", c.name)));
        }
        let composition = TeamComposition::new(c.carrier, c.supplier, c.observer);
        composition.validate().map_err(|e| range(format!("composition[{i}]"), e.to_string()))?;
        compositions.push(NamedComposition { name: c.name, composition });
    }
    Ok(MissionFile {
        mission: raw.mission,
        profiles,
        compositions,
    })
}

pub fn load_mission_file(path: impl AsRef<Path>) -> Result<MissionFile, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mission_file(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
[mission]
t_n = 300.0
l = 10.0
n = 12
c = 1.0
t_c = 0.5
e_c = 0.2
e_t = 5.0

[profiles.carrier]
v = 2.0
sen = 4.0

[[composition]]
name = "carriers"
carrier = 3
"#;

    #[test]
    fn overrides_merge_onto_defaults() {
        let f = parse_mission_file(TEXT, "m.toml").unwrap();
        assert_eq!(f.profiles.carrier.v, 2.0);
        assert_eq!(f.profiles.carrier.cap, 8.0);
        assert_eq!(f.composition("carriers").unwrap().composition, TeamComposition::new(3, 0, 0));
        assert!(f.mission.requirement.is_empty());
    }

    #[test]
    fn empty_composition_rejected() {
        let text = format!("{TEXT}\n[[composition]]\nname = \"none\"\n");
        assert!(matches!(parse_mission_file(&text, "m"), Err(ScenarioError::Range { .. })));
    }

    #[test]
    fn unknown_mission_key_rejected() {
        let text = TEXT.replace("e_t = 5.0", "e_t = 5.0\nspeed = 3");
        assert!(matches!(parse_mission_file(&text, "m"), Err(ScenarioError::Parse { .. })));
    }
}
