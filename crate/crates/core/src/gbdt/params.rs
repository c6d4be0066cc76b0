use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{
    determinant, hermitian_eigenvalues, lu_inverse, sylvester_solve, ComplexMatrix, C64, I,
};
use crate::seed::{BlockStructure, SeedSolution};

/// Residual tolerance for the parameter identities.
pub const PARAM_TOLERANCE: f64 = 1e-11;
/// Smallest admissible `|det|` for A₁, A₂ and S(0,0).
pub const DET_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionCase {
    GeneralMcde,
    LocalMatrix,
    Nonlocal,
    Ccde,
    ScalarCoupled,
    ScalarNonlocal,
}

impl ReductionCase {
    /// `A₂ = A*`, `Π₂ = -iΠ j^{p+1}`, `S = S*`.
    pub fn is_local(self) -> bool {
        matches!(self, ReductionCase::LocalMatrix | ReductionCase::Ccde)
    }

    /// `A₂ = -A*`, `Π₂(x,t) = -iΠ(-x,t) j^p`, `S(x,t) = -S(-x,t)*`.
    pub fn is_nonlocal(self) -> bool {
        matches!(self, ReductionCase::Nonlocal | ReductionCase::ScalarNonlocal)
    }

    pub fn is_scalar(self) -> bool {
        matches!(
            self,
            ReductionCase::Ccde | ReductionCase::ScalarCoupled | ReductionCase::ScalarNonlocal
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ReductionCase::GeneralMcde => "general",
            ReductionCase::LocalMatrix => "local",
            ReductionCase::Nonlocal => "nonlocal",
            ReductionCase::Ccde => "ccde",
            ReductionCase::ScalarCoupled => "scalar-coupled",
            ReductionCase::ScalarNonlocal => "scalar-nonlocal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "general" => ReductionCase::GeneralMcde,
            "local" => ReductionCase::LocalMatrix,
            "nonlocal" => ReductionCase::Nonlocal,
            "ccde" => ReductionCase::Ccde,
            "scalar-coupled" => ReductionCase::ScalarCoupled,
            "scalar-nonlocal" => ReductionCase::ScalarNonlocal,
            _ => return None,
        })
    }
}

impl fmt::Display for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The five GBDT parameter matrices plus the reduction tag.
#[derive(Clone, Debug)]
pub struct GbdtParameters {
    pub case: ReductionCase,
    pub structure: BlockStructure,
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub s0: ComplexMatrix,
    pub pi1_0: ComplexMatrix,
    pub pi2_0: ComplexMatrix,
}

impl GbdtParameters {
    /// Fully general parameters; S(0,0) is solved from the identity when
    /// omitted.
    pub fn general(
        structure: BlockStructure,
        a1: ComplexMatrix,
        a2: ComplexMatrix,
        pi1_0: ComplexMatrix,
        pi2_0: ComplexMatrix,
        s0: Option<ComplexMatrix>,
    ) -> Result<Self> {
        Self::assemble(ReductionCase::GeneralMcde, structure, a1, a2, pi1_0, pi2_0, s0)
    }

    /// Local reduction: `A₂ = A*`, `Π₂(0,0) = -iΠ(0,0) j^{p+1}`.
    pub fn local(structure: BlockStructure, a: ComplexMatrix, pi0: ComplexMatrix, s0: Option<ComplexMatrix>) -> Result<Self> {
        Self::local_like(ReductionCase::LocalMatrix, structure, a, pi0, s0)
    }

    /// Nonlocal reduction: `A₂ = -A*`, `Π₂(0,0) = -iΠ(0,0) j^p`.
    pub fn nonlocal(structure: BlockStructure, a: ComplexMatrix, pi0: ComplexMatrix, s0: Option<ComplexMatrix>) -> Result<Self> {
        Self::nonlocal_like(ReductionCase::Nonlocal, structure, a, pi0, s0)
    }

    /// Complex coupled dispersionless equations with `p = (1 + κ)/2`.
    pub fn ccde(kappa: i8, a: ComplexMatrix, pi0: ComplexMatrix, s0: Option<ComplexMatrix>) -> Result<Self> {
        let p = match kappa {
            1 => 1,
            -1 => 0,
            _ => return Err(Error::PreconditionViolated(format!("κ must be ±1, got {kappa}"))),
        };
        Self::local_like(ReductionCase::Ccde, BlockStructure::scalar(p), a, pi0, s0)
    }

    /// Scalar coupled system: m1 = m2 = 1, p = 1, general parameter shape.
    pub fn scalar_coupled(
        a1: ComplexMatrix,
        a2: ComplexMatrix,
        pi1_0: ComplexMatrix,
        pi2_0: ComplexMatrix,
        s0: Option<ComplexMatrix>,
    ) -> Result<Self> {
        Self::assemble(ReductionCase::ScalarCoupled, BlockStructure::scalar(1), a1, a2, pi1_0, pi2_0, s0)
    }

    /// Scalar nonlocal system: m1 = m2 = 1, nonlocal parameter shape.
    pub fn scalar_nonlocal(p: u8, a: ComplexMatrix, pi0: ComplexMatrix, s0: Option<ComplexMatrix>) -> Result<Self> {
        Self::nonlocal_like(ReductionCase::ScalarNonlocal, BlockStructure::scalar(p), a, pi0, s0)
    }

    fn local_like(
        case: ReductionCase,
        structure: BlockStructure,
        a: ComplexMatrix,
        pi0: ComplexMatrix,
        s0: Option<ComplexMatrix>,
    ) -> Result<Self> {
        let a2 = a.adjoint();
        let pi2 = (&pi0 * &structure.j_pow(structure.p() + 1)).scale(-I);
        Self::assemble(case, structure, a, a2, pi0, pi2, s0)
    }

    fn nonlocal_like(
        case: ReductionCase,
        structure: BlockStructure,
        a: ComplexMatrix,
        pi0: ComplexMatrix,
        s0: Option<ComplexMatrix>,
    ) -> Result<Self> {
        let a2 = -a.adjoint();
        let pi2 = (&pi0 * &structure.j_pow(structure.p())).scale(-I);
        Self::assemble(case, structure, a, a2, pi0, pi2, s0)
    }

    fn assemble(
        case: ReductionCase,
        structure: BlockStructure,
        a1: ComplexMatrix,
        a2: ComplexMatrix,
        pi1_0: ComplexMatrix,
        pi2_0: ComplexMatrix,
        s0: Option<ComplexMatrix>,
    ) -> Result<Self> {
        let n = a1.rows();
        if !a1.is_square() || !a2.is_square() || a2.rows() != n {
            return Err(Error::Shape(format!(
                "A1 is {}x{}, A2 is {}x{}; both must be n×n",
                a1.rows(),
                a1.cols(),
                a2.rows(),
                a2.cols()
            )));
        }
        let m = structure.m();
        for (name, p) in [("Pi", &pi1_0), ("Pi2", &pi2_0)] {
            if p.rows() != n || p.cols() != m {
                return Err(Error::Shape(format!("{name}(0,0) is {}x{}, expected {n}x{m}", p.rows(), p.cols())));
            }
        }
        if case.is_scalar() && (structure.m1 != 1 || structure.m2 != 1) {
            return Err(Error::PreconditionViolated(format!("{case} requires m1 = m2 = 1")));
        }
        if case == ReductionCase::ScalarCoupled && structure.p != 1 {
            return Err(Error::PreconditionViolated("scalar-coupled requires p = 1".into()));
        }
        let s0 = match s0 {
            Some(s) => {
                if s.rows() != n || s.cols() != n {
                    return Err(Error::Shape(format!("S0 is {}x{}, expected {n}x{n}", s.rows(), s.cols())));
                }
                s
            }
            None => solve_s0(&a1, &a2, &pi1_0, &pi2_0)?,
        };
        Ok(Self {
            case,
            structure,
            a1,
            a2,
            s0,
            pi1_0,
            pi2_0,
        })
    }

    pub fn n(&self) -> usize {
        self.a1.rows()
    }

    /// Checks every invariant of the reduction case and reports residuals.
    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }

    /// As [`validate`](Self::validate) plus seed compatibility.
    pub fn validate_with_seed(&self, seed: &SeedSolution) -> ValidationReport {
        let mut report = validate_params(self);
        if seed.structure() != self.structure {
            report.push("seed block structure", 1.0, 0.0);
        }
        let r = seed.r(0.0, 0.0);
        if self.case.is_local() {
            report.push("R = R*", r.dist(&r.adjoint()), PARAM_TOLERANCE);
        }
        if self.case.is_nonlocal() {
            report.push("R = -R*", (&r + &r.adjoint()).max_norm(), PARAM_TOLERANCE);
        }
        if matches!(self.case, ReductionCase::Ccde | ReductionCase::ScalarCoupled | ReductionCase::ScalarNonlocal) {
            let d = seed.diag();
            report.push("rho1 = rho2", (d[0] - d[1]).norm(), PARAM_TOLERANCE);
        }
        report
    }
}

/// S(0,0) from `A₁S − SA₂ = Π₁Π₂*` when the spectra are disjoint.
pub fn solve_s0(a1: &ComplexMatrix, a2: &ComplexMatrix, pi1: &ComplexMatrix, pi2: &ComplexMatrix) -> Result<ComplexMatrix> {
    sylvester_solve(a1, a2, &(pi1 * &pi2.adjoint()))
}

/// Back-substitution for `AS + SA* = K` with `A = [[a,1],[0,a]]`.
pub fn jordan_back_substitution(a: C64, k: &ComplexMatrix) -> ComplexMatrix {
    let s = a + a.conj();
    let s22 = k[(1, 1)] / s;
    let s12 = (k[(0, 1)] - s22) / s;
    let s21 = (k[(1, 0)] - s22) / s;
    let s11 = (k[(0, 0)] - s12 - s21) / s;
    ComplexMatrix::from_rows(&[vec![s11, s12], vec![s21, s22]]).expect("2x2")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    /// Record a residual that must not exceed `tolerance`.
    pub fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.entries.push(ValidationEntry {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        });
    }

    /// Record a magnitude that must be at least `minimum`.
    pub fn push_lower_bound(&mut self, name: &str, value: f64, minimum: f64) {
        self.entries.push(ValidationEntry {
            name: name.to_string(),
            residual: value,
            tolerance: minimum,
            pass: value.is_finite() && value >= minimum,
        });
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn entry(&self, name: &str) -> Option<&ValidationEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.pass() {
            Ok(self)
        } else {
            Err(Error::InvalidParameters(Box::new(self)))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "  {:<28} {:>12.3e}  (limit {:.0e})  {}",
                e.name,
                e.residual,
                e.tolerance,
                if e.pass { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

pub fn validate_params(p: &GbdtParameters) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = p.n();
    let scale = |m: &ComplexMatrix| m.max_norm().max(1.0);

    r.push_lower_bound("|det A1|", determinant(&p.a1).norm(), DET_TOLERANCE);
    r.push_lower_bound("|det A2|", determinant(&p.a2).norm(), DET_TOLERANCE);
    let s_scale = p.s0.max_norm().max(f64::MIN_POSITIVE);
    r.push_lower_bound("|det S0| (relative)", determinant(&p.s0).norm() / s_scale.powi(n as i32), DET_TOLERANCE);

    let rhs = &p.pi1_0 * &p.pi2_0.adjoint();
    let lhs = &(&p.a1 * &p.s0) - &(&p.s0 * &p.a2);
    r.push("A1 S0 - S0 A2 = Pi1 Pi2*", lhs.dist(&rhs) / scale(&rhs), PARAM_TOLERANCE);

    let s = p.structure;
    if p.case.is_local() {
        r.push("A2 = A1*", p.a2.dist(&p.a1.adjoint()), PARAM_TOLERANCE);
        let pi2 = (&p.pi1_0 * &s.j_pow(s.p() + 1)).scale(-I);
        r.push("Pi2 = -i Pi j^(p+1)", p.pi2_0.dist(&pi2), PARAM_TOLERANCE);
        r.push("S0 = S0*", p.s0.dist(&p.s0.adjoint()) / scale(&p.s0), PARAM_TOLERANCE);
    }
    if p.case.is_nonlocal() {
        r.push("A2 = -A1*", (&p.a2 + &p.a1.adjoint()).max_norm(), PARAM_TOLERANCE);
        let pi2 = (&p.pi1_0 * &s.j_pow(s.p())).scale(-I);
        r.push("Pi2 = -i Pi j^p", p.pi2_0.dist(&pi2), PARAM_TOLERANCE);
        r.push("S0 = -S0*", (&p.s0 + &p.s0.adjoint()).max_norm() / scale(&p.s0), PARAM_TOLERANCE);
    }
    r
}

/// Smallest eigenvalue of the Hermitian part of S, used for definiteness.
pub fn min_hermitian_eigenvalue(s: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(s).first().copied().unwrap_or(f64::NAN)
}

/// `A⁻¹`, mapping singularity to [`Error::SingularA`].
pub(crate) fn invert_a(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    lu_inverse(a).map_err(|_| Error::SingularA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, ONE, ZERO};

    #[test]
    fn scalar_general_passes() {
        let p = GbdtParameters::general(
            BlockStructure::scalar(0),
            ComplexMatrix::scalar(1, c(2.0, 0.0)),
            ComplexMatrix::scalar(1, ONE),
            ComplexMatrix::from_rows(&[vec![ONE, c(0.5, 0.0)]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), ONE]]).unwrap(),
            None,
        )
        .unwrap();
        assert!(p.validate().pass(), "{}", p.validate());
    }

    #[test]
    fn non_hermitian_s0_named() {
        let a = ComplexMatrix::scalar(1, c(0.5, -1.0));
        let pi = ComplexMatrix::from_rows(&[vec![ONE, c(2.0, 0.0)]]).unwrap();
        let p = GbdtParameters::local(BlockStructure::scalar(0), a, pi, Some(ComplexMatrix::scalar(1, c(1.5, 0.3)))).unwrap();
        let report = p.validate();
        assert!(!report.pass());
        assert!(!report.entry("S0 = S0*").unwrap().pass);
    }

    #[test]
    fn zero_pi_gives_degenerate_s0() {
        let a = ComplexMatrix::scalar(1, c(0.5, -1.0));
        let pi = ComplexMatrix::from_rows(&[vec![ZERO, ZERO]]).unwrap();
        let p = GbdtParameters::local(BlockStructure::scalar(0), a, pi, None).unwrap();
        assert_eq!(p.s0.max_norm(), 0.0);
        assert!(!p.validate().entry("|det S0| (relative)").unwrap().pass);
    }
}
