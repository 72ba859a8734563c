//! Seeded generators for PSD matrices and operators in `B_A`.
//!
//! Every random stream is a ChaCha8 generator keyed by
//! `stream_seed(master, trial, tag)`, so a trial regenerates bit-for-bit from
//! its seed path regardless of how trials are scheduled.

mod tightness;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{ChainEntry, InequalityReport, Operands, TheoremId};
use crate::linalg::{inner, vec_norm, ComplexMatrix, C64};
use crate::semihilbert::SemiHilbertContext;

pub use tightness::{tightness_search, TightnessOptions, TightnessResult};

/// RNG used for every stream.
pub type StreamRng = ChaCha8Rng;

/// Law of the positive eigenvalues of a generated `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumLaw {
    /// Uniform on (0, 1].
    Uniform,
    /// Log-uniform on [1e-3, 1e3].
    #[serde(rename = "loguniform")]
    LogUniform,
    /// All positive eigenvalues equal to 1.
    Equal,
}

/// Operator family of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "general_in_BA")]
    GeneralInBa,
    #[serde(rename = "a_selfadjoint")]
    ASelfadjoint,
    #[serde(rename = "shift_like")]
    ShiftLike,
    #[serde(rename = "unitary_scaled")]
    UnitaryScaled,
}

/// Structured operators for [`gen_special`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    /// `T̃ = c·J_r`, the r×r upper shift.
    ShiftLike,
    /// `T̃ = c·W` with `W` Haar unitary.
    UnitaryScaled,
    /// `T = c·I`.
    Scalar,
}

macro_rules! name_table {
    ($ty:ty, $($variant:path => $name:literal),+ $(,)?) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $(x if x == $name.to_ascii_lowercase() => Ok($variant),)+
                    _ => Err(Error::UnknownKind(s.to_string())),
                }
            }
        }
    };
}

name_table!(SpectrumLaw,
    SpectrumLaw::Uniform => "uniform",
    SpectrumLaw::LogUniform => "loguniform",
    SpectrumLaw::Equal => "equal",
);

name_table!(Family,
    Family::GeneralInBa => "general_in_BA",
    Family::ASelfadjoint => "a_selfadjoint",
    Family::ShiftLike => "shift_like",
    Family::UnitaryScaled => "unitary_scaled",
);

name_table!(SpecialKind,
    SpecialKind::ShiftLike => "shift_like",
    SpecialKind::UnitaryScaled => "unitary_scaled",
    SpecialKind::Scalar => "scalar",
);

impl SpectrumLaw {
    pub const ALL: [SpectrumLaw; 3] = [SpectrumLaw::Uniform, SpectrumLaw::LogUniform, SpectrumLaw::Equal];

    /// Closed support of the law.
    pub fn support(self) -> (f64, f64) {
        match self {
            SpectrumLaw::Uniform => (0.0, 1.0),
            SpectrumLaw::LogUniform => (1e-3, 1e3),
            SpectrumLaw::Equal => (1.0, 1.0),
        }
    }

    pub fn sample(self, rng: &mut impl Rng) -> f64 {
        match self {
            // 1 − U with U ∈ [0, 1) lands in (0, 1].
            SpectrumLaw::Uniform => 1.0 - rng.random::<f64>(),
            SpectrumLaw::LogUniform => 10f64.powf(6.0 * rng.random::<f64>() - 3.0),
            SpectrumLaw::Equal => 1.0,
        }
    }
}

impl Family {
    pub const ALL: [Family; 4] = [Family::GeneralInBa, Family::ASelfadjoint, Family::ShiftLike, Family::UnitaryScaled];
}

/// One cell of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub rank: usize,
    pub spectrum_law: SpectrumLaw,
    pub family: Family,
    pub count: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.rank == 0 || self.rank > self.n {
            return Err(Error::InvalidOptions(format!("need 1 ≤ rank ≤ n, got n = {}, rank = {}", self.n, self.rank)));
        }
        if self.count == 0 {
            return Err(Error::InvalidOptions("count must be positive".into()));
        }
        Ok(())
    }
}

/// Stream tags.
pub mod tag {
    pub const A: u64 = 0x41;
    pub const T: u64 = 0x54;
    pub const S: u64 = 0x53;
    pub const X: u64 = 0x58;
    pub const SEARCH: u64 = 0x5345_4152_4348;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream addressed by `(master, path…, tag)`.
pub fn stream_seed(master: u64, path: &[u64], tag: u64) -> u64 {
    let mut h = splitmix64(master);
    for &p in path {
        h = splitmix64(h ^ p);
    }
    splitmix64(h ^ tag)
}

pub fn stream_rng(master: u64, path: &[u64], tag: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(master, path, tag))
}

/// Standard complex Gaussian with unit variance per real component.
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Gaussian Hermitian matrix `(G + G*)/2`.
pub fn gaussian_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    gaussian_matrix(n, n, rng).hermitian_part()
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Gaussian matrix, with the positive-diagonal `R` convention.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(n, n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            // Two passes of modified Gram–Schmidt keep orthogonality at ε.
            for _ in 0..2 {
                for q in &cols {
                    let proj = inner(&v, q);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * qi;
                    }
                }
            }
            let nv = vec_norm(&v);
            if nv < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|z| *z /= nv);
            cols.push(v);
        }
        if ok {
            return ComplexMatrix::from_columns(n, &cols);
        }
    }
}

/// `A = Q diag(λ₁..λ_rank, 0..0) Q*` with `Q` Haar and `λ` from `law`.
pub fn gen_psd(n: usize, rank: usize, law: SpectrumLaw, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidOptions(format!("need 1 ≤ rank ≤ n, got n = {n}, rank = {rank}")));
    }
    let q = haar_unitary(n, rng);
    let mut d = vec![0.0; n];
    for l in d.iter_mut().take(rank) {
        *l = law.sample(rng);
    }
    Ok(q.scale_cols(&d).matmul(&q.adjoint()).hermitian_part())
}

/// `[U₊ V]·B·[U₊ V]*` for a block matrix `B` in the eigenbasis of `A`.
fn from_blocks(ctx: &SemiHilbertContext, b: &ComplexMatrix) -> ComplexMatrix {
    let w = ComplexMatrix::from_fn(ctx.dim(), ctx.dim(), |i, j| {
        if j < ctx.rank() {
            ctx.range_basis()[(i, j)]
        } else {
            ctx.null_basis()[(i, j - ctx.rank())]
        }
    });
    w.matmul(b).matmul(&w.adjoint())
}

/// Block matrix `[[T₁₁, 0], [T₂₁, T₂₂]]` with `T₁₁` given and Gaussian
/// null-space blocks.
fn with_null_blocks(ctx: &SemiHilbertContext, t11: &ComplexMatrix, rng: &mut impl Rng) -> ComplexMatrix {
    let (n, r) = (ctx.dim(), ctx.rank());
    let lower = gaussian_matrix(n - r, n, rng);
    ComplexMatrix::from_fn(n, n, |i, j| match (i < r, j < r) {
        (true, true) => t11[(i, j)],
        (true, false) => C64::new(0.0, 0.0),
        (false, _) => lower[(i - r, j)],
    })
}

/// Operator whose reduction is `m`, plus Gaussian null-space blocks.
pub fn lift_reduced(ctx: &SemiHilbertContext, m: &ComplexMatrix, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    m.ensure_order(ctx.rank())?;
    let sqrt_l: Vec<f64> = ctx.positive_eigenvalues().iter().map(|l| l.sqrt()).collect();
    let inv_sqrt_l: Vec<f64> = sqrt_l.iter().map(|s| 1.0 / s).collect();
    let t11 = m.scale_rows(&inv_sqrt_l).scale_cols(&sqrt_l);
    Ok(from_blocks(ctx, &with_null_blocks(ctx, &t11, rng)))
}

/// `T = [U V]·[[T₁₁, 0], [T₂₁, T₂₂]]·[U V]*` with Gaussian blocks.
pub fn gen_operator_in_ba(ctx: &SemiHilbertContext, rng: &mut impl Rng) -> ComplexMatrix {
    let t11 = gaussian_matrix(ctx.rank(), ctx.rank(), rng);
    from_blocks(ctx, &with_null_blocks(ctx, &t11, rng))
}

/// `T = A†H + N` with `H = PHP` Gaussian Hermitian and the columns of `N` in
/// `N(A)`. Assembled in the eigenbasis of `A`, where `A†H` is the block
/// `Λ₊⁻¹H₁₁`.
pub fn gen_a_selfadjoint(ctx: &SemiHilbertContext, rng: &mut impl Rng) -> ComplexMatrix {
    let h11 = gaussian_hermitian(ctx.rank(), rng);
    let inv_l: Vec<f64> = ctx.positive_eigenvalues().iter().map(|l| 1.0 / l).collect();
    let t11 = h11.scale_rows(&inv_l);
    from_blocks(ctx, &with_null_blocks(ctx, &t11, rng))
}

/// Structured member of `B_A` of the given kind, scaled by `c`.
pub fn gen_special(ctx: &SemiHilbertContext, kind: SpecialKind, c: C64, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    let r = ctx.rank();
    match kind {
        SpecialKind::Scalar => Ok(ComplexMatrix::identity(ctx.dim()).scale(c)),
        SpecialKind::ShiftLike => {
            let shift = ComplexMatrix::from_fn(r, r, |i, j| if j == i + 1 { c } else { C64::new(0.0, 0.0) });
            lift_reduced(ctx, &shift, rng)
        }
        SpecialKind::UnitaryScaled => {
            let w = haar_unitary(r, rng).scale(c);
            lift_reduced(ctx, &w, rng)
        }
    }
}

/// String form of [`gen_special`]; unknown kinds fail with `UnknownKind`.
pub fn gen_special_named(ctx: &SemiHilbertContext, kind: &str, c: C64, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    gen_special(ctx, kind.parse()?, c, rng)
}

/// One operator from `family`.
pub fn gen_family(ctx: &SemiHilbertContext, family: Family, rng: &mut impl Rng) -> ComplexMatrix {
    match family {
        Family::GeneralInBa => gen_operator_in_ba(ctx, rng),
        Family::ASelfadjoint => gen_a_selfadjoint(ctx, rng),
        Family::ShiftLike => {
            let c = complex_gaussian(rng);
            gen_special(ctx, SpecialKind::ShiftLike, c, rng).expect("reduced order matches rank")
        }
        Family::UnitaryScaled => {
            let c = complex_gaussian(rng);
            gen_special(ctx, SpecialKind::UnitaryScaled, c, rng).expect("reduced order matches rank")
        }
    }
}

/// Distinct ranks among `{n, n − 1, ⌈n/2⌉}` (dropping 0), descending.
pub fn default_ranks(n: usize) -> Vec<usize> {
    let mut r = vec![n, n.saturating_sub(1), n.div_ceil(2)];
    r.retain(|&k| k >= 1);
    r.sort_unstable_by(|a, b| b.cmp(a));
    r.dedup();
    r
}

/// Address of one generated trial inside a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialKey {
    pub n: usize,
    pub rank: usize,
    pub family: Family,
    pub law: SpectrumLaw,
    pub index: u64,
}

/// A generated trial: `A`, its context and the operators `T, S, X`.
#[derive(Debug, Clone)]
pub struct GeneratedTrial {
    pub a: ComplexMatrix,
    pub ctx: SemiHilbertContext,
    pub operands: Operands,
}

impl TrialKey {
    pub fn path(&self) -> [u64; 5] {
        let family = Family::ALL.iter().position(|f| *f == self.family).unwrap_or(0) as u64;
        let law = SpectrumLaw::ALL.iter().position(|l| *l == self.law).unwrap_or(0) as u64;
        [self.n as u64, self.rank as u64, family, law, self.index]
    }

    /// Regenerates the trial; identical keys give bit-identical matrices.
    pub fn generate(&self, master_seed: u64) -> Result<GeneratedTrial> {
        let path = self.path();
        let a = gen_psd(self.n, self.rank, self.law, &mut stream_rng(master_seed, &path, tag::A))?;
        let ctx = SemiHilbertContext::new(&a, None)?;
        let op = |t: u64| gen_family(&ctx, self.family, &mut stream_rng(master_seed, &path, t));
        let operands = Operands { t: op(tag::T), s: Some(op(tag::S)), x: Some(op(tag::X)) };
        Ok(GeneratedTrial { a, ctx, operands })
    }
}

/// How a witness was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPath {
    pub master_seed: u64,
    pub trial: TrialKey,
    /// Present for witnesses refined by [`tightness_search`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<TightnessOptions>,
}

/// A recorded instance together with the chain it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub theorem_id: TheoremId,
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    pub operators: Operands,
    pub chain: Vec<ChainEntry>,
    pub slacks: Vec<f64>,
    /// Smallest slack relative to its right-hand side.
    pub min_slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_path: Option<SeedPath>,
}

impl Witness {
    pub fn from_report(
        a: &ComplexMatrix,
        operators: &Operands,
        report: &InequalityReport,
        seed_path: Option<SeedPath>,
    ) -> Self {
        Self {
            theorem_id: report.theorem_id,
            a: a.clone(),
            operators: operators.clone(),
            chain: report.chain.clone(),
            slacks: report.slacks.clone(),
            min_slack: report.min_relative_slack,
            seed_path,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, numerical_rank_default};

    fn rng(seed: u64) -> StreamRng {
        StreamRng::seed_from_u64(seed)
    }

    #[test]
    fn seeds_depend_on_every_component() {
        let base = stream_seed(1, &[2, 3], 4);
        assert_eq!(base, stream_seed(1, &[2, 3], 4));
        assert_ne!(base, stream_seed(2, &[2, 3], 4));
        assert_ne!(base, stream_seed(1, &[3, 2], 4));
        assert_ne!(base, stream_seed(1, &[2, 3], 5));
    }

    #[test]
    fn names_round_trip() {
        for l in SpectrumLaw::ALL {
            assert_eq!(l.as_str().parse::<SpectrumLaw>().unwrap(), l);
            assert_eq!(serde_json::to_string(&l).unwrap(), format!("\"{l}\""));
        }
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{f}\""));
        }
        assert_eq!("general_in_ba".parse::<Family>().unwrap(), Family::GeneralInBa);
        assert!(matches!("spiral".parse::<SpecialKind>(), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn haar_is_unitary() {
        let q = haar_unitary(5, &mut rng(3));
        let d = q.adjoint().matmul(&q).distance(&ComplexMatrix::identity(5));
        assert!(d < 1e-14, "{d}");
    }

    #[test]
    fn psd_examples() {
        let a = gen_psd(2, 2, SpectrumLaw::Equal, &mut rng(1)).unwrap();
        assert!(a.distance(&ComplexMatrix::identity(2)) < 1e-14);

        let a = gen_psd(3, 1, SpectrumLaw::Uniform, &mut rng(2)).unwrap();
        assert_eq!(numerical_rank_default(&a).unwrap(), 1);
        let ev = hermitian_eigenvalues(&a).unwrap();
        assert!((a.trace().re - ev[0]).abs() < 1e-14);

        let a1 = gen_psd(4, 3, SpectrumLaw::LogUniform, &mut rng(9)).unwrap();
        let a2 = gen_psd(4, 3, SpectrumLaw::LogUniform, &mut rng(9)).unwrap();
        assert_eq!(a1.as_slice(), a2.as_slice());
        assert!(gen_psd(2, 3, SpectrumLaw::Equal, &mut rng(1)).is_err());
    }

    #[test]
    fn psd_spectrum_follows_law() {
        let mut g = rng(11);
        for law in SpectrumLaw::ALL {
            let (lo, hi) = law.support();
            for n in 1..=6 {
                for rank in default_ranks(n) {
                    let a = gen_psd(n, rank, law, &mut g).unwrap();
                    assert_eq!(numerical_rank_default(&a).unwrap(), rank, "{law} n={n} rank={rank}");
                    let ev = hermitian_eigenvalues(&a).unwrap();
                    for &l in &ev[..rank] {
                        assert!(l > lo * (1.0 - 1e-12) && l <= hi * (1.0 + 1e-12), "{law}: {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn generated_operators_are_members() {
        let mut g = rng(5);
        for law in SpectrumLaw::ALL {
            for n in [1, 2, 3, 4, 6] {
                for rank in default_ranks(n) {
                    let a = gen_psd(n, rank, law, &mut g).unwrap();
                    let ctx = SemiHilbertContext::new(&a, None).unwrap();
                    for family in Family::ALL {
                        let t = gen_family(&ctx, family, &mut g);
                        let m = ctx.membership(&t).unwrap();
                        assert!(m.residual <= 1e-12, "{family} {law} n={n} r={rank}: {}", m.residual);
                    }
                    let t = gen_a_selfadjoint(&ctx, &mut g);
                    assert!(ctx.is_a_selfadjoint(&t));
                }
            }
        }
    }

    #[test]
    fn block_form_on_diagonal_a() {
        let ctx = SemiHilbertContext::new(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), None).unwrap();
        let t = gen_operator_in_ba(&ctx, &mut rng(4));
        assert!(t[(0, 1)].norm() < 1e-15);
        assert!(ctx.in_ba(&t));
        let ctx = SemiHilbertContext::new(&ComplexMatrix::identity(3), None).unwrap();
        let t = gen_operator_in_ba(&ctx, &mut rng(4));
        assert!(t.as_slice().iter().all(|z| z.norm() > 0.0));
    }

    #[test]
    fn special_examples() {
        let ctx = SemiHilbertContext::new(&ComplexMatrix::identity(2), None).unwrap();
        let c = C64::new(0.0, 2.0);
        let t = gen_special(&ctx, SpecialKind::ShiftLike, c, &mut rng(1)).unwrap();
        let want = ComplexMatrix::from_rows(&[&[C64::new(0.0, 0.0), c], &[C64::new(0.0, 0.0), C64::new(0.0, 0.0)]]);
        assert!(ctx.tilde(&t).unwrap().distance(&want) < 1e-14);
        let t = gen_special(&ctx, SpecialKind::Scalar, C64::new(1.0, 0.0), &mut rng(1)).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2));
        let t = gen_special_named(&ctx, "unitary_scaled", C64::new(3.0, 4.0), &mut rng(1)).unwrap();
        let w = crate::numrange::numerical_radius(&ctx.tilde(&t).unwrap(), &Default::default()).unwrap();
        assert!((w - 5.0).abs() < 1e-9, "{w}");
        assert!(matches!(gen_special_named(&ctx, "spiral", c, &mut rng(1)), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn trial_regeneration_is_bitwise() {
        let key = TrialKey { n: 4, rank: 2, family: Family::ASelfadjoint, law: SpectrumLaw::LogUniform, index: 17 };
        let g1 = key.generate(42).unwrap();
        let g2 = key.generate(42).unwrap();
        assert_eq!(g1.a.as_slice(), g2.a.as_slice());
        assert_eq!(g1.operands, g2.operands);
        assert_eq!(g1.ctx.rank(), 2);
        let other = TrialKey { index: 18, ..key }.generate(42).unwrap();
        assert_ne!(g1.a.as_slice(), other.a.as_slice());
    }

    #[test]
    fn ranks() {
        assert_eq!(default_ranks(1), vec![1]);
        assert_eq!(default_ranks(2), vec![2, 1]);
        assert_eq!(default_ranks(3), vec![3, 2]);
        assert_eq!(default_ranks(6), vec![6, 5, 3]);
    }
}
