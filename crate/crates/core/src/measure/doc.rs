//! JSON measure documents.

use serde::{Deserialize, Serialize};

use super::{Atom, AtomicComb, BuiltinComb, DensityMeasure, EmpiricalMeasure, MeasureSpec};
use crate::error::Result;
use crate::quadrature::QuadPolicy;

/// `{"measure": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDocument {
    pub measure: MeasureDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureDoc {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    Cauchy {
        loc: f64,
        scale: f64,
    },
    PowerTail {
        a: f64,
        b: f64,
    },
    CombEx1 {},
    CombEx2 {},
    CombEx4 {},
    CombEx5 {},
    /// Atoms at the positive integers with weight proportional to `n^-p`.
    PowerLaw {
        p: f64,
    },
    /// `[location, weight]` pairs.
    Finite {
        atoms: Vec<[f64; 2]>,
    },
    Empirical {
        samples: Vec<f64>,
    },
    Shift {
        inner: Box<MeasureDoc>,
        a: f64,
    },
    Scale {
        inner: Box<MeasureDoc>,
        lambda: f64,
    },
    Negate {
        inner: Box<MeasureDoc>,
    },
}

impl MeasureDoc {
    pub fn build(&self, quad: &QuadPolicy) -> Result<MeasureSpec> {
        Ok(match self {
            MeasureDoc::Gaussian { mu, sigma } => DensityMeasure::gaussian(*mu, *sigma)?.with_quadrature(*quad).into(),
            MeasureDoc::Cauchy { loc, scale } => DensityMeasure::cauchy(*loc, *scale)?.with_quadrature(*quad).into(),
            MeasureDoc::PowerTail { a, b } => DensityMeasure::power_tail(*a, *b)?.with_quadrature(*quad).into(),
            MeasureDoc::CombEx1 {} => AtomicComb::builtin(BuiltinComb::Ex1).into(),
            MeasureDoc::CombEx2 {} => AtomicComb::builtin(BuiltinComb::Ex2).into(),
            MeasureDoc::CombEx4 {} => AtomicComb::builtin(BuiltinComb::Ex4).into(),
            MeasureDoc::CombEx5 {} => AtomicComb::builtin(BuiltinComb::Ex5).into(),
            MeasureDoc::PowerLaw { p } => AtomicComb::power_law(*p)?.into(),
            MeasureDoc::Finite { atoms } => {
                AtomicComb::finite(atoms.iter().map(|[z, w]| Atom::raw(*z, *w)).collect())?.into()
            }
            MeasureDoc::Empirical { samples } => EmpiricalMeasure::new(samples.clone())?.into(),
            MeasureDoc::Shift { inner, a } => inner.build(quad)?.shift(*a)?,
            MeasureDoc::Scale { inner, lambda } => inner.build(quad)?.scale(*lambda)?,
            MeasureDoc::Negate { inner } => inner.build(quad)?.negate(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_wrappers() {
        let text = r#"{"measure": {"family": "negate", "inner": {"family": "comb_ex4"}}}"#;
        let doc: MeasureDocument = serde_json::from_str(text).unwrap();
        let m = doc.measure.build(&QuadPolicy::default()).unwrap();
        assert_eq!(m.name(), "negate(comb_ex4)");
        let back = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<MeasureDocument>(&back).unwrap(), doc);
    }

    #[test]
    fn rejects_unknown_fields_and_families() {
        let bad = [
            r#"{"measure": {"family": "cauchy", "loc": 0, "scale": 1, "extra": 2}}"#,
            r#"{"measure": {"family": "levy"}}"#,
            r#"{"measure": {"family": "comb_ex1"}, "other": 1}"#,
            r#"{"measure": {"family": "comb_ex1", "k": 1}}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<MeasureDocument>(text).is_err(), "{text}");
        }
    }

    #[test]
    fn invalid_parameters_fail_at_build() {
        let doc = MeasureDoc::Gaussian { mu: 0.0, sigma: -1.0 };
        assert!(doc.build(&QuadPolicy::default()).is_err());
        let doc = MeasureDoc::Scale {
            inner: Box::new(MeasureDoc::CombEx2 {}),
            lambda: 0.0,
        };
        assert!(doc.build(&QuadPolicy::default()).is_err());
    }
}
