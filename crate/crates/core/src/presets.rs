//! Built-in parameter sets: the two worked scalar examples and the five
//! Jordan-block nonlocal configurations.

use crate::error::{Error, Result};
use crate::gbdt::{GbdtParameters, SMode, TransformedSolution};
use crate::grid::{Field, GridSpec};
use crate::matrix::{c, ComplexMatrix, C64, I, ONE, ZERO};
use crate::oracles::{Case1Params, Case2Params, Example24Params, Example42Params, JordanParams, OracleParams};
use crate::seed::{BlockStructure, SeedSolution};

pub const PRESET_IDS: [&str; 7] = ["ex24", "ex42", "fig1", "fig2", "fig3", "fig4", "fig5"];

#[derive(Clone, Debug)]
pub struct Preset {
    pub id: &'static str,
    pub params: GbdtParameters,
    pub seed: SeedSolution,
    /// Closed form for the plotted fields, where one is known.
    pub oracle: Option<OracleParams>,
    /// Independent formula that also exists for the Jordan presets without
    /// a printed closed form.
    pub jordan: Option<JordanParams>,
    pub grid: GridSpec,
    pub fields: Vec<Field>,
}

impl Preset {
    pub fn solution(&self, mode: SMode) -> Result<TransformedSolution> {
        TransformedSolution::new(self.params.clone(), self.seed.clone(), mode)
    }
}

pub fn preset(id: &str) -> Result<Preset> {
    match id {
        "ex24" => example24(),
        "ex42" => example42(),
        "fig1" => jordan_preset(
            "fig1",
            JordanParams {
                p: 1,
                a: c(0.5, 1.0 / 3.0),
                c1: [c(1.0, 2.0), ZERO],
                c2: [ZERO, c(4.0, 3.0)],
            },
        ),
        "fig2" => jordan_preset(
            "fig2",
            JordanParams {
                p: 1,
                a: c(1.0 / 3.0, 0.2),
                c1: [c(3.0, 0.0), ONE],
                c2: [ZERO, c(0.5, 0.0)],
            },
        ),
        "fig3" => jordan_preset(
            "fig3",
            JordanParams {
                p: 1,
                a: c(0.5, 1.0 / 3.0),
                c1: [ONE, c(0.0, 2.0)],
                c2: [c(0.0, 3.0), c(4.0, 0.0)],
            },
        ),
        "fig4" => jordan_preset(
            "fig4",
            JordanParams {
                p: 0,
                a: c(1.5, 0.5),
                c1: [c(1.0, 3.0), c(3.0, 2.0)],
                c2: [c(6.0, 1.0), c(2.0, -4.0)],
            },
        ),
        "fig5" => jordan_preset(
            "fig5",
            JordanParams {
                p: 1,
                a: c(1.0, 1.0),
                c1: [I, ONE],
                c2: [ONE, I],
            },
        ),
        other => Err(Error::config(
            None,
            "example",
            format!("unknown preset `{other}`, expected one of {}", PRESET_IDS.join(", ")),
        )),
    }
}

fn m(rows: &[&[C64]]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("rectangular literal")
}

fn example24() -> Result<Preset> {
    let q = Example24Params {
        p: 1,
        a1: c(0.8, 0.3),
        a2: c(-0.4, 0.9),
        d1: c(1.5, 0.0),
        d2: c(-0.7, 0.2),
        phi1: c(1.0, 1.0),
        phi2: c(0.5, 0.0),
        psi1: c(0.3, -1.0),
        psi2: c(2.0, 0.1),
    };
    let params = GbdtParameters::general(
        BlockStructure::scalar(q.p),
        m(&[&[q.a1]]),
        m(&[&[q.a2]]),
        m(&[&[q.phi1, q.phi2]]),
        m(&[&[q.psi1, q.psi2]]),
        None,
    )?;
    let seed = SeedSolution::const_diag(BlockStructure::scalar(1), vec![q.d1, q.d2])?;
    Ok(Preset {
        id: "ex24",
        params,
        seed,
        oracle: Some(OracleParams::Example24(q)),
        jordan: None,
        grid: GridSpec::default(),
        fields: vec![Field::AbsV, Field::V, Field::Rho1],
    })
}

fn example42() -> Result<Preset> {
    let q = Example42Params {
        p: 1,
        a: c(0.7, -0.4),
        d: 1.3,
        c1: c(1.0, 0.5),
        c2: c(0.3, -0.8),
    };
    let params = GbdtParameters::ccde(2 * q.p as i8 - 1, m(&[&[q.a]]), m(&[&[q.c1, q.c2]]), None)?;
    let d = c(q.d, 0.0);
    let seed = SeedSolution::const_diag(BlockStructure::scalar(q.p), vec![d, d])?;
    Ok(Preset {
        id: "ex42",
        params,
        seed,
        oracle: Some(OracleParams::Example42(q)),
        jordan: None,
        grid: GridSpec::default(),
        fields: vec![Field::AbsV, Field::Rho, Field::DetS],
    })
}

fn jordan_preset(id: &'static str, q: JordanParams) -> Result<Preset> {
    let a = m(&[&[q.a, ONE], &[ZERO, q.a]]);
    let pi0 = m(&[&[q.c1[0], q.c2[0]], &[q.c1[1], q.c2[1]]]);
    let params = GbdtParameters::scalar_nonlocal(q.p, a, pi0, None)?;
    let seed = SeedSolution::const_diag(BlockStructure::scalar(q.p), vec![I, I])?;
    let real = |z: C64| (z.im == 0.0).then_some(z.re);
    let oracle = if q.c1[1] == ZERO && q.c2[0] == ZERO {
        Some(OracleParams::Case1(Case1Params {
            p: q.p,
            a: q.a,
            c11: q.c1[0],
            c22: q.c2[1],
        }))
    } else if let (1, true, Some(c11), Some(c12), Some(c22)) =
        (q.p, q.c2[0] == ZERO, real(q.c1[0]), real(q.c1[1]), real(q.c2[1]))
    {
        Some(OracleParams::Case2(Case2Params { a: q.a, c11, c12, c22 }))
    } else {
        None
    };
    Ok(Preset {
        id,
        params,
        seed,
        oracle,
        jordan: Some(q),
        grid: GridSpec::default(),
        fields: vec![Field::AbsV, Field::LnAbsRho],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_assignment() {
        let which: Vec<Option<&str>> = PRESET_IDS
            .iter()
            .map(|id| preset(id).unwrap().oracle.map(|o| o.name()))
            .collect();
        assert_eq!(
            which,
            vec![Some("example24"), Some("example42"), Some("case1"), Some("case2"), None, None, None]
        );
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(preset("fig9"), Err(Error::Config { .. })));
    }
}
