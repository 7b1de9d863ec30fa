//! Canonical input documents written by `--emit-examples`.

use std::path::{Path, PathBuf};

use anyhow::Result;
use tailmean::maxent::MaxEntProblem;
use tailmean::spectral::BridgeFamily;
use tailmean::{MeasureDoc, MeasureDocument};

use crate::commands::SpectralDocument;
use crate::output::Artifacts;

fn measures() -> Vec<(&'static str, MeasureDoc)> {
    let power_tail = MeasureDoc::PowerTail { a: 1.5, b: 1.8 };
    vec![
        ("measure_comb_ex1.json", MeasureDoc::CombEx1 {}),
        ("measure_comb_ex2.json", MeasureDoc::CombEx2 {}),
        ("measure_comb_ex4.json", MeasureDoc::CombEx4 {}),
        ("measure_comb_ex5.json", MeasureDoc::CombEx5 {}),
        (
            "measure_negated_comb_ex4.json",
            MeasureDoc::Negate {
                inner: Box::new(MeasureDoc::CombEx4 {}),
            },
        ),
        ("measure_cauchy.json", MeasureDoc::Cauchy { loc: 0.0, scale: 1.0 }),
        ("measure_gaussian.json", MeasureDoc::Gaussian { mu: 0.0, sigma: 1.0 }),
        ("measure_power_tail.json", power_tail.clone()),
        (
            "measure_negated_power_tail.json",
            MeasureDoc::Negate {
                inner: Box::new(power_tail),
            },
        ),
    ]
}

fn maxent_problems() -> Vec<(&'static str, MaxEntProblem)> {
    let faces = vec![(1..=6).map(f64::from).collect::<Vec<f64>>()];
    vec![
        ("maxent_uniform6.json", MaxEntProblem::unconstrained(6)),
        (
            "maxent_die_mean_4_5.json",
            MaxEntProblem::new(6, faces.clone(), vec![4.5]),
        ),
        ("maxent_die_infeasible.json", MaxEntProblem::new(6, faces, vec![7.0])),
    ]
}

fn spectral_documents() -> Vec<(&'static str, SpectralDocument)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        (
            "spectral_pauli_y.json",
            SpectralDocument {
                matrix: Some(vec![vec![[0.0, 0.0], [0.0, -1.0]], vec![[0.0, 1.0], [0.0, 0.0]]]),
                state: Some(vec![[s, 0.0], [0.0, s]]),
                bridge: None,
            },
        ),
        (
            "bridge_signed_dyadic.json",
            SpectralDocument {
                matrix: None,
                state: None,
                bridge: Some(BridgeFamily::SignedDyadic {}),
            },
        ),
        (
            "bridge_power_law_3.json",
            SpectralDocument {
                matrix: None,
                state: None,
                bridge: Some(BridgeFamily::PowerLaw { p: 3.0 }),
            },
        ),
    ]
}

pub fn emit(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut art = Artifacts::new(dir.to_path_buf())?;
    for (name, measure) in measures() {
        art.json(name, &MeasureDocument { measure })?;
    }
    for (name, problem) in maxent_problems() {
        art.json(name, &problem)?;
    }
    for (name, doc) in spectral_documents() {
        art.json(name, &doc)?;
    }
    Ok(art.written)
}
