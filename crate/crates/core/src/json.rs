//! Serde schemas for the file formats, with conversions into the validated
//! domain types. Rationals travel as strings `a/b` (`/b` omitted when 1).

use serde::{Deserialize, Serialize};

use crate::galois::GaloisDecomposition;
use crate::gl::{EndoClassProfile, Level};
use crate::herbrand::TwistSample;
use crate::rat::Rat;
use crate::ultrametric::UltrametricTable;
use crate::Result;

mod rat_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rat::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

mod rat_string_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rat::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rat>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// `{"dim": int, "components": [{"dim": int, "swan": int}, ...]}`
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DecompositionJson {
    pub dim: u64,
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ComponentJson {
    pub dim: u64,
    pub swan: u64,
}

impl DecompositionJson {
    pub fn into_domain(self) -> Result<GaloisDecomposition> {
        GaloisDecomposition::new(
            self.dim,
            self.components
                .into_iter()
                .map(|c| (c.dim, c.swan))
                .collect(),
        )
    }
}

impl From<&GaloisDecomposition> for DecompositionJson {
    fn from(d: &GaloisDecomposition) -> Self {
        DecompositionJson {
            dim: d.dim(),
            components: d
                .components()
                .iter()
                .map(|&(dim, swan)| ComponentJson { dim, swan })
                .collect(),
        }
    }
}

/// `{"p":, "deg":, "e":, "f":, "m": "a/b", "k0": "a/b"|null, "trivial":,
/// "tower": [{"jump": "a/b", "d":, "ex":, "c":}, ...]}`
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ProfileJson {
    pub p: u64,
    pub deg: u64,
    pub e: u64,
    pub f: u64,
    #[serde(with = "rat_string")]
    pub m: Rat,
    #[serde(with = "rat_string_opt", default)]
    pub k0: Option<Rat>,
    #[serde(default)]
    pub trivial: bool,
    #[serde(default)]
    pub tower: Vec<TowerEntryJson>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TowerEntryJson {
    #[serde(with = "rat_string")]
    pub jump: Rat,
    pub d: u64,
    pub ex: u64,
    pub c: u64,
}

impl ProfileJson {
    pub fn into_domain(self) -> Result<EndoClassProfile> {
        let (jumps, levels) = self
            .tower
            .into_iter()
            .map(|t| {
                (
                    t.jump,
                    Level {
                        d: t.d,
                        ex: t.ex,
                        c: t.c,
                    },
                )
            })
            .unzip();
        EndoClassProfile::new(
            self.p,
            self.deg,
            self.e,
            self.f,
            self.m,
            self.k0,
            jumps,
            levels,
            self.trivial,
        )
    }
}

impl From<&EndoClassProfile> for ProfileJson {
    fn from(p: &EndoClassProfile) -> Self {
        ProfileJson {
            p: p.p(),
            deg: p.deg(),
            e: p.e(),
            f: p.f(),
            m: p.m().clone(),
            k0: p.k0().cloned(),
            trivial: p.is_trivial(),
            tower: p
                .jumps()
                .iter()
                .zip(p.levels())
                .map(|(jump, l)| TowerEntryJson {
                    jump: jump.clone(),
                    d: l.d,
                    ex: l.ex,
                    c: l.c,
                })
                .collect(),
        }
    }
}

/// `{"labels": [...], "dist": [["a/b", ...], ...], "separating": bool}`
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TableJson {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<String>>,
    pub separating: bool,
}

impl TableJson {
    pub fn into_domain(self) -> Result<UltrametricTable> {
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|s| crate::rat::parse_rat(s)).collect())
            .collect::<Result<Vec<Vec<Rat>>>>()?;
        UltrametricTable::new(self.labels, dist, self.separating)
    }
}

impl From<&UltrametricTable> for TableJson {
    fn from(t: &UltrametricTable) -> Self {
        TableJson {
            labels: t.labels().to_vec(),
            dist: t
                .rows()
                .iter()
                .map(|row| row.iter().map(crate::rat::format_rat).collect())
                .collect(),
            separating: t.separating(),
        }
    }
}

/// `{"e": int, "k": int, "value": "a/b"}`; sample files are arrays of these.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SampleJson {
    pub e: u64,
    pub k: u64,
    #[serde(with = "rat_string")]
    pub value: Rat,
}

impl SampleJson {
    pub fn into_domain(self) -> Result<TwistSample> {
        TwistSample::new(self.e, self.k, self.value)
    }
}

impl From<&TwistSample> for SampleJson {
    fn from(s: &TwistSample) -> Self {
        SampleJson {
            e: s.e,
            k: s.k,
            value: s.value.clone(),
        }
    }
}

/// Labeled profiles for catalog-level commands.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct LabeledProfileJson {
    pub label: String,
    pub profile: ProfileJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn decomposition_round_trip() {
        let text = r#"{"dim": 4, "components": [
            {"dim": 1, "swan": 0},
            {"dim": 3, "swan": 1}, {"dim": 3, "swan": 1}, {"dim": 3, "swan": 1},
            {"dim": 3, "swan": 1}, {"dim": 3, "swan": 1}]}"#;
        let parsed: DecompositionJson = serde_json::from_str(text).unwrap();
        let d = parsed.into_domain().unwrap();
        assert_eq!(d.dim(), 4);
        let back = serde_json::to_string(&DecompositionJson::from(&d)).unwrap();
        let reparsed: DecompositionJson = serde_json::from_str(&back).unwrap();
        assert_eq!(reparsed.into_domain().unwrap(), d);
    }

    #[test]
    fn profile_round_trip() {
        let text = r#"{"p": 2, "deg": 4, "e": 4, "f": 1, "m": "1/2", "k0": "-1/4",
            "trivial": false,
            "tower": [{"jump": "1/4", "d": 4, "ex": 4, "c": 5},
                      {"jump": "1/2", "d": 2, "ex": 2, "c": 1}]}"#;
        let parsed: ProfileJson = serde_json::from_str(text).unwrap();
        let p = parsed.into_domain().unwrap();
        assert_eq!(p.m(), &ratio(1, 2));
        let back = serde_json::to_string(&ProfileJson::from(&p)).unwrap();
        assert_eq!(
            serde_json::from_str::<ProfileJson>(&back)
                .unwrap()
                .into_domain()
                .unwrap(),
            p
        );
    }

    #[test]
    fn trivial_profile_parses_with_null_k0() {
        let text = r#"{"p": 3, "deg": 1, "e": 1, "f": 1, "m": "0", "k0": null,
            "trivial": true, "tower": []}"#;
        let p = serde_json::from_str::<ProfileJson>(text)
            .unwrap()
            .into_domain()
            .unwrap();
        assert!(p.is_trivial());
    }

    #[test]
    fn invalid_profile_is_rejected_with_the_invariant_named() {
        let text = r#"{"p": 2, "deg": 4, "e": 4, "f": 1, "m": "1/2", "k0": "-1/4",
            "trivial": false,
            "tower": [{"jump": "1/4", "d": 4, "ex": 4, "c": 5},
                      {"jump": "1/2", "d": 3, "ex": 2, "c": 1}]}"#;
        let err = serde_json::from_str::<ProfileJson>(text)
            .unwrap()
            .into_domain()
            .unwrap_err();
        assert!(err.to_string().contains("divide"), "{err}");
    }

    #[test]
    fn table_round_trip() {
        let text = r#"{"labels": ["a", "b"], "dist": [["0", "1/2"], ["1/2", "0"]],
            "separating": true}"#;
        let t = serde_json::from_str::<TableJson>(text)
            .unwrap()
            .into_domain()
            .unwrap();
        assert_eq!(t.dist(0, 1), &ratio(1, 2));
        let back = serde_json::to_string(&TableJson::from(&t)).unwrap();
        assert_eq!(
            serde_json::from_str::<TableJson>(&back)
                .unwrap()
                .into_domain()
                .unwrap(),
            t
        );
    }

    #[test]
    fn sample_round_trip() {
        let text = r#"[{"e": 2, "k": 3, "value": "5/4"}]"#;
        let parsed: Vec<SampleJson> = serde_json::from_str(text).unwrap();
        let s = parsed[0].clone().into_domain().unwrap();
        assert_eq!(s.abscissa(), ratio(3, 2));
        assert_eq!(s.ordinate(), ratio(5, 8));
    }
}
