//! Seminorm and numerical-radius inequalities as checkable value chains.
//!
//! Every check produces an ordered chain `v₀ ≤ v₁ ≤ …` together with the
//! per-link slacks `v_{i+1} − v_i`. A chain is satisfied when every slack is
//! at least `−tol · max(1, |v_{i+1}|)`.
//!
//! All chains are evaluated on the reduced matrices `T̃, S̃, X̃`. Since
//! `T ↦ T̃` is a unital *-homomorphism on `B_A` with `(T♯)~ = T̃*`, an
//! expression such as `‖S♯XT‖_A` is `‖S̃* X̃ T̃‖`, and the identity inside a
//! seminorm reduces to `I_r`. This keeps the arithmetic in the r×r space
//! where the A-quantities live and avoids forming `A†` products.

mod suite;

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, min_singular_value, spectral_norm, ComplexMatrix, I};
use crate::numrange::{numerical_radius, SweepOptions};
use crate::semihilbert::SemiHilbertContext;
use crate::tol::VERDICT_TOL;

pub use suite::{
    run_instances, run_suite, RankSelector, SkippedCheck, SuiteConfig, SuiteRun, Summary, TheoremSummary, TrialInput,
    TrialOutcome, TrialStatus,
};

/// Identifier of a single chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "base_11")]
    Base11,
    #[serde(rename = "base_12")]
    Base12,
    #[serde(rename = "thm21")]
    Thm21,
    #[serde(rename = "cor22")]
    Cor22,
    #[serde(rename = "thm23_i")]
    Thm23I,
    #[serde(rename = "thm23_ii")]
    Thm23Ii,
    #[serde(rename = "thm23_iii")]
    Thm23Iii,
    #[serde(rename = "thm23_iv")]
    Thm23Iv,
    #[serde(rename = "thm23_v")]
    Thm23V,
    #[serde(rename = "thm25")]
    Thm25,
    #[serde(rename = "rem26_weak")]
    Rem26Weak,
    #[serde(rename = "rem26_feki")]
    Rem26Feki,
    #[serde(rename = "thm27")]
    Thm27,
    #[serde(rename = "thm28_i")]
    Thm28I,
    #[serde(rename = "thm28_ii")]
    Thm28Ii,
    #[serde(rename = "thm28_iii")]
    Thm28Iii,
    #[serde(rename = "thm28_iv")]
    Thm28Iv,
    #[serde(rename = "thm28_v")]
    Thm28V,
    #[serde(rename = "rem28_a")]
    Rem28A,
    #[serde(rename = "rem28_b")]
    Rem28B,
    #[serde(rename = "rem28_eq")]
    Rem28Eq,
    #[serde(rename = "thm29")]
    Thm29,
    #[serde(rename = "thm210")]
    Thm210,
}

/// Operators a chain needs besides `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    T,
    ST,
    STX,
}

impl TheoremId {
    pub const ALL: [TheoremId; 23] = [
        TheoremId::Base11,
        TheoremId::Base12,
        TheoremId::Thm21,
        TheoremId::Cor22,
        TheoremId::Thm23I,
        TheoremId::Thm23Ii,
        TheoremId::Thm23Iii,
        TheoremId::Thm23Iv,
        TheoremId::Thm23V,
        TheoremId::Thm25,
        TheoremId::Rem26Weak,
        TheoremId::Rem26Feki,
        TheoremId::Thm27,
        TheoremId::Thm28I,
        TheoremId::Thm28Ii,
        TheoremId::Thm28Iii,
        TheoremId::Thm28Iv,
        TheoremId::Thm28V,
        TheoremId::Rem28A,
        TheoremId::Rem28B,
        TheoremId::Rem28Eq,
        TheoremId::Thm29,
        TheoremId::Thm210,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Base11 => "base_11",
            TheoremId::Base12 => "base_12",
            TheoremId::Thm21 => "thm21",
            TheoremId::Cor22 => "cor22",
            TheoremId::Thm23I => "thm23_i",
            TheoremId::Thm23Ii => "thm23_ii",
            TheoremId::Thm23Iii => "thm23_iii",
            TheoremId::Thm23Iv => "thm23_iv",
            TheoremId::Thm23V => "thm23_v",
            TheoremId::Thm25 => "thm25",
            TheoremId::Rem26Weak => "rem26_weak",
            TheoremId::Rem26Feki => "rem26_feki",
            TheoremId::Thm27 => "thm27",
            TheoremId::Thm28I => "thm28_i",
            TheoremId::Thm28Ii => "thm28_ii",
            TheoremId::Thm28Iii => "thm28_iii",
            TheoremId::Thm28Iv => "thm28_iv",
            TheoremId::Thm28V => "thm28_v",
            TheoremId::Rem28A => "rem28_a",
            TheoremId::Rem28B => "rem28_b",
            TheoremId::Rem28Eq => "rem28_eq",
            TheoremId::Thm29 => "thm29",
            TheoremId::Thm210 => "thm210",
        }
    }

    pub fn arity(self) -> Arity {
        match self {
            TheoremId::Thm21 => Arity::STX,
            TheoremId::Cor22
            | TheoremId::Thm23I
            | TheoremId::Thm23Ii
            | TheoremId::Thm23Iii
            | TheoremId::Thm23Iv
            | TheoremId::Thm23V
            | TheoremId::Thm27 => Arity::ST,
            _ => Arity::T,
        }
    }

    /// Chains whose precondition may legitimately fail; a failure is reported
    /// as `ConditionNotMet`, not as a violation.
    pub fn is_conditional(self) -> bool {
        self == TheoremId::Rem28Eq
    }

    /// Resolves selectors: an exact id, or a group prefix such as `thm23`
    /// (matching `thm23_i` … `thm23_v`). An empty list selects everything.
    pub fn select(selectors: &[String]) -> Result<Vec<TheoremId>> {
        if selectors.is_empty() {
            return Ok(Self::ALL.to_vec());
        }
        let mut out = Vec::new();
        for sel in selectors {
            let sel = sel.trim();
            let group = format!("{sel}_");
            let hits: Vec<TheoremId> =
                Self::ALL.iter().copied().filter(|id| id.as_str() == sel || id.as_str().starts_with(&group)).collect();
            if hits.is_empty() {
                return Err(Error::UnknownTheorem(sel.to_string()));
            }
            out.extend(hits);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|id| id.as_str() == s).ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

/// One labelled value of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub label: String,
    pub value: f64,
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    pub chain: Vec<ChainEntry>,
    /// `chain[i+1] − chain[i]`.
    pub slacks: Vec<f64>,
    /// `min_i slacks[i] / max(1, |chain[i+1]|)`.
    pub min_relative_slack: f64,
    pub satisfied: bool,
    pub tol_used: f64,
    /// SHA-256 of the bit patterns of `A` and the operators.
    pub witness_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_residual: Option<f64>,
}

impl InequalityReport {
    pub fn new(theorem_id: TheoremId, chain: Vec<(&str, f64)>, tol: f64, witness_digest: String) -> Self {
        let chain: Vec<ChainEntry> =
            chain.into_iter().map(|(label, value)| ChainEntry { label: label.to_string(), value }).collect();
        let slacks: Vec<f64> = chain.windows(2).map(|w| w[1].value - w[0].value).collect();
        let mut min_relative_slack = f64::INFINITY;
        let mut satisfied = true;
        for (slack, rhs) in slacks.iter().zip(&chain[1..]) {
            let scale = rhs.value.abs().max(1.0);
            min_relative_slack = min_relative_slack.min(slack / scale);
            // NaN slacks fail.
            satisfied &= *slack >= -tol * scale;
        }
        Self {
            theorem_id,
            chain,
            slacks,
            min_relative_slack,
            satisfied,
            tol_used: tol,
            witness_digest,
            condition_residual: None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.chain.iter().map(|e| e.value).collect()
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Operators handed to a check. `S` and `X` are needed only by the two- and
/// three-operator chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operands {
    #[serde(rename = "T")]
    pub t: ComplexMatrix,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<ComplexMatrix>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<ComplexMatrix>,
}

impl Operands {
    pub fn t(t: ComplexMatrix) -> Self {
        Self { t, s: None, x: None }
    }

    pub fn st(s: ComplexMatrix, t: ComplexMatrix) -> Self {
        Self { t, s: Some(s), x: None }
    }

    pub fn stx(s: ComplexMatrix, t: ComplexMatrix, x: ComplexMatrix) -> Self {
        Self { t, s: Some(s), x: Some(x) }
    }

    /// `(name, matrix)` pairs in the fixed order `T, S, X`.
    pub fn named(&self) -> Vec<(&'static str, &ComplexMatrix)> {
        let mut v = vec![("T", &self.t)];
        if let Some(s) = &self.s {
            v.push(("S", s));
        }
        if let Some(x) = &self.x {
            v.push(("X", x));
        }
        v
    }

    pub fn supports(&self, id: TheoremId) -> bool {
        match id.arity() {
            Arity::T => true,
            Arity::ST => self.s.is_some(),
            Arity::STX => self.s.is_some() && self.x.is_some(),
        }
    }
}

/// SHA-256 over the IEEE bit patterns of `A` and the named operators.
pub fn witness_digest(a: &ComplexMatrix, ops: &Operands) -> String {
    let mut h = Sha256::new();
    let mut feed = |name: &str, m: &ComplexMatrix| {
        h.update(name.as_bytes());
        h.update((m.rows() as u64).to_le_bytes());
        h.update((m.cols() as u64).to_le_bytes());
        for z in m.as_slice() {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
    };
    feed("A", a);
    for (name, m) in ops.named() {
        feed(name, m);
    }
    hex::encode(h.finalize())
}

/// Crawford number of a Hermitian matrix: its numerical range is
/// `[λ_min, λ_max]`.
fn hermitian_crawford(h: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(h)?;
    let (hi, lo) = (ev[0], ev[ev.len() - 1]);
    Ok(if lo >= 0.0 {
        lo
    } else if hi <= 0.0 {
        -hi
    } else {
        0.0
    })
}

fn cached(cell: &OnceCell<f64>, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if let Some(v) = cell.get() {
        return Ok(*v);
    }
    let v = f()?;
    let _ = cell.set(v);
    Ok(v)
}

/// Reduced operators plus lazily computed shared quantities.
pub(crate) struct Evaluator<'a> {
    t: ComplexMatrix,
    s: Option<ComplexMatrix>,
    x: Option<ComplexMatrix>,
    opts: &'a SweepOptions,
    w_t: OnceCell<f64>,
    norm_t: OnceCell<f64>,
    norm_k: OnceCell<f64>,
    norm_plus: OnceCell<f64>,
    norm_minus: OnceCell<f64>,
    c_plus: OnceCell<f64>,
    c_minus: OnceCell<f64>,
    w_sst: OnceCell<f64>,
    w_sts: OnceCell<f64>,
}

impl<'a> Evaluator<'a> {
    /// Verifies membership of every operand and reduces them.
    pub(crate) fn new(ctx: &SemiHilbertContext, ops: &Operands, opts: &'a SweepOptions) -> Result<Self> {
        let reduce = |m: &ComplexMatrix| ctx.tilde(m);
        Ok(Self {
            t: reduce(&ops.t)?,
            s: ops.s.as_ref().map(reduce).transpose()?,
            x: ops.x.as_ref().map(reduce).transpose()?,
            opts,
            w_t: OnceCell::new(),
            norm_t: OnceCell::new(),
            norm_k: OnceCell::new(),
            norm_plus: OnceCell::new(),
            norm_minus: OnceCell::new(),
            c_plus: OnceCell::new(),
            c_minus: OnceCell::new(),
            w_sst: OnceCell::new(),
            w_sts: OnceCell::new(),
        })
    }

    fn s(&self) -> Result<&ComplexMatrix> {
        self.s.as_ref().ok_or_else(|| Error::InvalidOptions("check requires operator S".into()))
    }

    fn x(&self) -> Result<&ComplexMatrix> {
        self.x.as_ref().ok_or_else(|| Error::InvalidOptions("check requires operator X".into()))
    }

    fn w(&self, m: &ComplexMatrix) -> Result<f64> {
        numerical_radius(m, self.opts)
    }

    fn w_t(&self) -> Result<f64> {
        cached(&self.w_t, || self.w(&self.t))
    }

    fn norm_t(&self) -> Result<f64> {
        cached(&self.norm_t, || spectral_norm(&self.t))
    }

    /// `K~ = T̃*T̃ + T̃T̃*`.
    fn k(&self) -> ComplexMatrix {
        let ts = self.t.adjoint();
        &ts.matmul(&self.t) + &self.t.matmul(&ts)
    }

    fn norm_k(&self) -> Result<f64> {
        cached(&self.norm_k, || spectral_norm(&self.k()))
    }

    fn plus(&self) -> ComplexMatrix {
        &self.t + &self.t.adjoint()
    }

    fn minus(&self) -> ComplexMatrix {
        &self.t - &self.t.adjoint()
    }

    /// `‖T + T♯‖_A`.
    fn a(&self) -> Result<f64> {
        cached(&self.norm_plus, || spectral_norm(&self.plus()))
    }

    /// `‖T − T♯‖_A`.
    fn b(&self) -> Result<f64> {
        cached(&self.norm_minus, || spectral_norm(&self.minus()))
    }

    fn c_plus(&self) -> Result<f64> {
        cached(&self.c_plus, || hermitian_crawford(&self.plus()))
    }

    /// `c_A(T − T♯) = c_A(−i(T − T♯))`, and the latter is A-selfadjoint.
    fn c_minus(&self) -> Result<f64> {
        cached(&self.c_minus, || hermitian_crawford(&self.minus().scale(-I)))
    }

    /// `w_A(S♯T)`.
    fn w_sst(&self) -> Result<f64> {
        cached(&self.w_sst, || self.w(&self.s()?.adjoint().matmul(&self.t)))
    }

    /// `w_A(ST♯)`.
    fn w_sts(&self) -> Result<f64> {
        cached(&self.w_sts, || self.w(&self.s()?.matmul(&self.t.adjoint())))
    }

    fn norm(&self, m: &ComplexMatrix) -> Result<f64> {
        spectral_norm(m)
    }

    /// `(1/√3)‖M² + p²I + pM‖^{1/2}` for Hermitian `M` and scalar `p ≥ 0`.
    fn cubic_bracket(&self, m: &ComplexMatrix, p: f64) -> Result<f64> {
        let r = m.rows();
        let inner = &(&m.matmul(m) + &ComplexMatrix::identity(r).scale_real(p * p)) + &m.scale_real(p);
        Ok(self.norm(&inner)?.sqrt() / 3f64.sqrt())
    }

    /// `‖(T+T♯)²(T−T♯)²‖_A`.
    fn mixed_square_norm(&self) -> Result<f64> {
        let p = self.plus();
        let q = self.minus();
        self.norm(&p.matmul(&p).matmul(&q).matmul(&q))
    }

    /// Relative residual of `(T+T♯)²(T−T♯)² = 0` on the reduced space; the
    /// expression is quartic in `T`, hence the `‖T‖⁴` normalization.
    pub(crate) fn condition_residual(&self) -> Result<f64> {
        let p = self.plus();
        let q = self.minus();
        let prod = p.matmul(&p).matmul(&q).matmul(&q);
        Ok(prod.frobenius_norm() / self.norm_t()?.powi(4).max(1.0))
    }

    pub(crate) fn chain(&self, id: TheoremId) -> Result<Vec<(&'static str, f64)>> {
        let half = 0.5;
        Ok(match id {
            TheoremId::Base11 => {
                let n = self.norm_t()?;
                vec![("‖T‖_A/2", n / 2.0), ("w_A(T)", self.w_t()?), ("‖T‖_A", n)]
            }
            TheoremId::Base12 => {
                let k = self.norm_k()?;
                vec![("‖K‖_A/4", k / 4.0), ("w_A(T)²", self.w_t()?.powi(2)), ("‖K‖_A/2", k / 2.0)]
            }
            TheoremId::Thm21 => {
                let (s, x, t) = (self.s()?, self.x()?, &self.t);
                let lhs = self.norm(&s.adjoint().matmul(x).matmul(t))?;
                let rhs = &s.matmul(&s.adjoint()).matmul(x) + &x.matmul(t).matmul(&t.adjoint());
                vec![("2‖S♯XT‖_A", 2.0 * lhs), ("‖SS♯X + XTT♯‖_A", self.norm(&rhs)?)]
            }
            TheoremId::Cor22 => {
                let (s, t) = (self.s()?, &self.t);
                let lhs = self.norm(&s.adjoint().matmul(t))?;
                let rhs = &s.matmul(&s.adjoint()) + &t.matmul(&t.adjoint());
                vec![("2‖S♯T‖_A", 2.0 * lhs), ("‖SS♯ + TT♯‖_A", self.norm(&rhs)?)]
            }
            TheoremId::Thm23I => {
                let (s, t) = (self.s()?, &self.t);
                let (ns, nt) = (self.norm(s)?, self.norm_t()?);
                let cross = &s.adjoint().matmul(t) + &t.adjoint().matmul(s);
                let mid = (ns * ns + nt * nt + self.norm(&cross)?).sqrt();
                vec![("‖S+T‖_A", self.norm(&(s + t))?), ("(‖S‖²+‖T‖²+‖S♯T+T♯S‖)^½", mid), ("‖S‖_A+‖T‖_A", ns + nt)]
            }
            TheoremId::Thm23Ii => {
                let (s, t) = (self.s()?, &self.t);
                let (ns, nt) = (self.norm(s)?, self.norm_t()?);
                let mid = (ns * ns + nt * nt + ns * nt + self.w_sst()?.min(self.w_sts()?)).sqrt();
                vec![
                    ("‖S+T‖_A", self.norm(&(s + t))?),
                    ("(‖S‖²+‖T‖²+‖S‖‖T‖+min{w(S♯T),w(ST♯)})^½", mid),
                    ("‖S‖_A+‖T‖_A", ns + nt),
                ]
            }
            TheoremId::Thm23Iii => {
                let (s, t) = (self.s()?, &self.t);
                let (ns, nt) = (self.norm(s)?, self.norm_t()?);
                let gram = &s.adjoint().matmul(s) + &t.adjoint().matmul(t);
                let rhs = ns * ns + nt * nt + half * self.norm(&gram)? + self.w_sst()?;
                vec![("‖S+T‖_A²", self.norm(&(s + t))?.powi(2)), ("‖S‖²+‖T‖²+½‖S♯S+T♯T‖+w(S♯T)", rhs)]
            }
            TheoremId::Thm23Iv => {
                let (s, t) = (self.s()?, &self.t);
                let (ns, nt) = (self.norm(s)?, self.norm_t()?);
                let gram = &s.matmul(&s.adjoint()) + &t.matmul(&t.adjoint());
                let rhs = ns * ns + nt * nt + half * self.norm(&gram)? + self.w_sts()?;
                vec![("‖S+T‖_A²", self.norm(&(s + t))?.powi(2)), ("‖S‖²+‖T‖²+½‖SS♯+TT♯‖+w(ST♯)", rhs)]
            }
            TheoremId::Thm23V => {
                let (s, t) = (self.s()?, &self.t);
                let p = self.norm(&s.matmul(&t.adjoint()))?;
                let gram = &s.adjoint().matmul(s) + &t.adjoint().matmul(t);
                let m = gram.scale_real(half).hermitian_part();
                vec![
                    ("‖ST♯‖_A", p),
                    ("(1/√3)‖M² + ‖ST♯‖²I + ‖ST♯‖M‖^½", self.cubic_bracket(&m, p)?),
                    ("½‖S♯S+T♯T‖_A", half * self.norm(&gram)?),
                ]
            }
            TheoremId::Thm25 => {
                let (a, b) = (self.a()?, self.b()?);
                let sum = (a * a + b * b) / 8.0;
                let crawford = (self.c_plus()?.powi(2) + self.c_minus()?.powi(2)) / 8.0;
                vec![
                    ("‖K‖_A/4", self.norm_k()? / 4.0),
                    ("(‖T+T♯‖²+‖T−T♯‖²)/8", sum),
                    ("(‖T+T♯‖²+‖T−T♯‖²)/8 + (c²(T+T♯)+c²(T−T♯))/8", sum + crawford),
                    ("w_A(T)²", self.w_t()?.powi(2)),
                ]
            }
            TheoremId::Rem26Weak => {
                let crawford = (self.c_plus()?.powi(2) + self.c_minus()?.powi(2)) / 8.0;
                vec![
                    ("‖K‖_A/4 + (c²(T+T♯)+c²(T−T♯))/8", self.norm_k()? / 4.0 + crawford),
                    ("w_A(T)²", self.w_t()?.powi(2)),
                ]
            }
            TheoremId::Rem26Feki => {
                let n2 = self.norm_t()?.powi(2) / 4.0;
                let m = min_singular_value(&self.t)?.max(min_singular_value(&self.t.adjoint())?);
                vec![
                    ("‖T‖_A²/4", n2),
                    ("‖T‖_A²/4 + max{m_A²(T), m_A²(T♯)}/4", n2 + m * m / 4.0),
                    ("‖K‖_A/4", self.norm_k()? / 4.0),
                    ("w_A(T)²", self.w_t()?.powi(2)),
                ]
            }
            TheoremId::Thm27 => {
                let (s, t) = (self.s()?, &self.t);
                let lhs = self.w(&t.adjoint().matmul(s))?;
                let gram = &s.adjoint().matmul(s) + &t.adjoint().matmul(t);
                vec![("w_A(T♯S)", lhs), ("½‖S♯S+T♯T‖_A", half * self.norm(&gram)?)]
            }
            TheoremId::Thm28I => {
                let (a, b) = (self.a()?, self.b()?);
                vec![("(max{a²,b²}+ab)/8", ((a * a).max(b * b) + a * b) / 8.0), ("w_A(T)²", self.w_t()?.powi(2))]
            }
            TheoremId::Thm28Ii => {
                let (a, b) = (self.a()?, self.b()?);
                let mid = (a.powi(4) + b.powi(4)).sqrt() / (4.0 * 2f64.sqrt());
                vec![("‖K‖_A/4", self.norm_k()? / 4.0), ("(a⁴+b⁴)^½/(4√2)", mid), ("w_A(T)²", self.w_t()?.powi(2))]
            }
            TheoremId::Thm28Iii => {
                vec![("[(a²+b²)² + ½(a²−b²)²]^½/8", self.thm28_iii_bracket()?), ("w_A(T)²", self.w_t()?.powi(2))]
            }
            TheoremId::Thm28Iv => {
                let k = self.norm_k()?;
                let lower = k / 2.0 - self.mixed_square_norm()?.sqrt() / 4.0;
                vec![("‖K‖/2 − ‖(T+T♯)²(T−T♯)²‖^½/4", lower), ("w_A(T)²", self.w_t()?.powi(2)), ("‖K‖_A/2", k / 2.0)]
            }
            TheoremId::Thm28V => {
                let w2 = self.w_t()?.powi(2);
                let m = self.k().scale_real(half).hermitian_part();
                vec![
                    ("w_A(T)²", w2),
                    ("(1/√3)‖M² + w⁴I + w²M‖^½", self.cubic_bracket(&m, w2)?),
                    ("‖K‖_A/2", self.norm_k()? / 2.0),
                ]
            }
            TheoremId::Rem28A => {
                let (a, b) = (self.a()?, self.b()?);
                vec![("(a²+b²)/8", (a * a + b * b) / 8.0), ("(max{a²,b²}+ab)/8", ((a * a).max(b * b) + a * b) / 8.0)]
            }
            TheoremId::Rem28B => {
                let (a, b) = (self.a()?, self.b()?);
                vec![
                    ("‖K‖_A/4", self.norm_k()? / 4.0),
                    ("(a²+b²)/8", (a * a + b * b) / 8.0),
                    ("[(a²+b²)² + ½(a²−b²)²]^½/8", self.thm28_iii_bracket()?),
                ]
            }
            TheoremId::Rem28Eq => {
                let k = self.norm_k()? / 2.0;
                vec![("‖K‖_A/2", k), ("w_A(T)²", self.w_t()?.powi(2)), ("‖K‖_A/2", k)]
            }
            TheoremId::Thm29 => {
                let n = self.norm_t()?;
                let q = self.norm(&self.t.matmul(&self.t))?.sqrt();
                let right = half * n + half * q;
                let mid = ((q * right + half * self.norm_k()?) / 2.0).sqrt();
                vec![
                    ("w_A(T)", self.w_t()?),
                    ("(1/√2)[‖T²‖^½(½‖T‖+½‖T²‖^½) + ½‖K‖]^½", mid),
                    ("½‖T‖_A+½‖T²‖_A^½", right),
                ]
            }
            TheoremId::Thm210 => {
                let k2 = self.norm_k()?.powi(2);
                let t2 = self.t.matmul(&self.t);
                let re = (&t2 + &t2.adjoint()).scale_real(half);
                let c = hermitian_crawford(&re.matmul(&re).hermitian_part())?;
                vec![
                    ("‖K‖²/16 + c_A(Re_A(T²)²)/4", k2 / 16.0 + c / 4.0),
                    ("w_A(T)⁴", self.w_t()?.powi(4)),
                    ("‖K‖²/8 + w_A(T²)²/2", k2 / 8.0 + half * self.w(&t2)?.powi(2)),
                ]
            }
        })
    }

    fn thm28_iii_bracket(&self) -> Result<f64> {
        let (a2, b2) = (self.a()?.powi(2), self.b()?.powi(2));
        Ok(((a2 + b2).powi(2) + 0.5 * (a2 - b2).powi(2)).sqrt() / 8.0)
    }
}

/// Evaluates one chain.
pub fn check(
    ctx: &SemiHilbertContext,
    id: TheoremId,
    ops: &Operands,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check_many(ctx, &[id], ops, opts, tol).pop().expect("one id in, one result out")
}

/// Evaluates several chains on the same operands, sharing the reduction and
/// the numerical-range sweeps. Membership failures are reported for every
/// requested id.
pub fn check_many(
    ctx: &SemiHilbertContext,
    ids: &[TheoremId],
    ops: &Operands,
    opts: &SweepOptions,
    tol: f64,
) -> Vec<Result<InequalityReport>> {
    let setup = opts.validate().and_then(|_| {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidOptions(format!("tolerance must be finite and non-negative, got {tol}")));
        }
        Evaluator::new(ctx, ops, opts)
    });
    let eval = match setup {
        Ok(e) => e,
        Err(e) => return ids.iter().map(|_| Err(e.clone())).collect(),
    };
    let digest = witness_digest(ctx.a(), ops);
    ids.iter().map(|&id| evaluate(&eval, ctx, id, tol, &digest)).collect()
}

pub(crate) fn evaluate(
    eval: &Evaluator<'_>,
    ctx: &SemiHilbertContext,
    id: TheoremId,
    tol: f64,
    digest: &str,
) -> Result<InequalityReport> {
    let mut condition = None;
    if id.is_conditional() {
        let residual = eval.condition_residual()?;
        if residual > ctx.tolerances().condition {
            return Err(Error::ConditionNotMet { residual });
        }
        condition = Some(residual);
    }
    let chain = eval.chain(id)?;
    let mut report = InequalityReport::new(id, chain, tol, digest.to_string());
    report.condition_residual = condition;
    Ok(report)
}

fn collect(results: Vec<Result<InequalityReport>>) -> Result<Vec<InequalityReport>> {
    results.into_iter().collect()
}

/// `‖T‖_A/2 ≤ w_A(T) ≤ ‖T‖_A`.
pub fn check_base_11(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Base11, &Operands::t(t.clone()), opts, tol)
}

/// `¼‖T♯T + TT♯‖_A ≤ w_A²(T) ≤ ½‖T♯T + TT♯‖_A`.
pub fn check_base_12(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Base12, &Operands::t(t.clone()), opts, tol)
}

/// `2‖S♯XT‖_A ≤ ‖SS♯X + XTT♯‖_A`.
pub fn check_thm21(
    ctx: &SemiHilbertContext,
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    x: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Thm21, &Operands::stx(s.clone(), t.clone(), x.clone()), opts, tol)
}

/// The `X = I` case: `2‖S♯T‖_A ≤ ‖SS♯ + TT♯‖_A`.
pub fn check_cor22(
    ctx: &SemiHilbertContext,
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Cor22, &Operands::st(s.clone(), t.clone()), opts, tol)
}

/// The five bounds on `‖S + T‖_A` and `‖ST♯‖_A`, in order (i)–(v).
pub fn check_thm23(
    ctx: &SemiHilbertContext,
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<Vec<InequalityReport>> {
    let ids = [TheoremId::Thm23I, TheoremId::Thm23Ii, TheoremId::Thm23Iii, TheoremId::Thm23Iv, TheoremId::Thm23V];
    collect(check_many(ctx, &ids, &Operands::st(s.clone(), t.clone()), opts, tol))
}

/// The Cartesian-decomposition lower bound for `w_A²(T)`, followed by the
/// weak form and the comparison with the `m_A` bound.
pub fn check_thm25(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<Vec<InequalityReport>> {
    let ids = [TheoremId::Thm25, TheoremId::Rem26Weak, TheoremId::Rem26Feki];
    collect(check_many(ctx, &ids, &Operands::t(t.clone()), opts, tol))
}

/// `w_A(T♯S) ≤ ½‖S♯S + T♯T‖_A`.
pub fn check_thm27(
    ctx: &SemiHilbertContext,
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Thm27, &Operands::st(s.clone(), t.clone()), opts, tol)
}

/// The five bounds (i) to (v) on `w_A²(T)` through `‖T ± T♯‖_A`, followed by
/// the orderings between the bracketed bounds.
pub fn check_thm28(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<Vec<InequalityReport>> {
    let ids = [
        TheoremId::Thm28I,
        TheoremId::Thm28Ii,
        TheoremId::Thm28Iii,
        TheoremId::Thm28Iv,
        TheoremId::Thm28V,
        TheoremId::Rem28A,
        TheoremId::Rem28B,
    ];
    collect(check_many(ctx, &ids, &Operands::t(t.clone()), opts, tol))
}

/// `w_A²(T) = ½‖T♯T + TT♯‖_A` when `A(T+T♯)²(T−T♯)² = 0`; fails with
/// `ConditionNotMet` otherwise.
pub fn check_equality_condition(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Rem28Eq, &Operands::t(t.clone()), opts, tol)
}

/// Upper bounds for `w_A(T)` through `‖T²‖_A`.
pub fn check_thm29(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Thm29, &Operands::t(t.clone()), opts, tol)
}

/// Two-sided fourth-power bound for `w_A⁴(T)`.
pub fn check_thm210(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    opts: &SweepOptions,
    tol: f64,
) -> Result<InequalityReport> {
    check(ctx, TheoremId::Thm210, &Operands::t(t.clone()), opts, tol)
}

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = VERDICT_TOL;
