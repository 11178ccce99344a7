//! Seeded generators of elements, automorphisms and standard-form maps,
//! adversarial near-misses, and the verification suites.

use crate::algebra::{check_axioms, homomorphism_residual, star_map_residual, Family, JordanAlgebra};
use crate::capelli::{independence_capelli, independence_gram, kit_commutator_triple};
use crate::decompose::{
    bresar_polarized_residual, central_annihilator_check, central_compatibility_residual, commuting_pairs, cross_block_linear_residual,
    cross_block_trace_residual, decompose_linear, decompose_preserver, decompose_trace, associative_identity_residual, linear_associating_residual,
    mixed_product_form, opcomm_preservation_sampled, sharp, symmetric_preserver_check, trace_associating_residual, validate_linear_form,
    BilinearMap, DecomposeError, PreserverDecomposition, PreserverMode,
};
use crate::kit::{build_kit, build_kit_variant, verify_kit, ElementaryKit, KitError, Variant};
use crate::numerics::{derive_seed, max_abs, random_matrix, random_scalar, random_vector, rng_from_seed, CMatrix, CVector, Tolerance, C64, ONE};
use crate::report::{Record, Report};
use crate::zoo::{albert_symmetry_catalog, by_name, matrix_coords, matrix_of, quadratic_forms, spin_symmetry_catalog, ZooError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::str::FromStr;
use thiserror::Error;

const MAX_RETRIES: usize = 64;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("retries exhausted: {0}")]
    RetriesExhausted(String),
    #[error("no symmetry catalog for `{0}`")]
    CatalogEmpty(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown adversarial kind `{0}`")]
    UnknownKind(String),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Kit(#[from] KitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub master_seed: u64,
    pub samples: usize,
    pub magnitude: f64,
    pub adversarial_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { master_seed: 0, samples: 100, magnitude: 1.0, adversarial_rate: 0.0 }
    }
}

pub const SUITES: [&str; 13] = [
    "axioms",
    "kits",
    "topping",
    "spin_commutant",
    "bresar_identities",
    "capelli_agreement",
    "central_annihilator",
    "decompose_linear_roundtrip",
    "decompose_trace_roundtrip",
    "preserver_roundtrip",
    "preserver_symmetric",
    "negative_controls",
    "mixed_products",
];

/// Algebras on which kits, linear maps and traces are exercised.
pub const KIT_ALGEBRAS: [&str; 7] = ["matrix:3", "matrix:4", "spin:4", "spin:6", "albert", "sum:matrix:3+matrix:4", "func:albert:2"];

/// Algebras on which preservers are exercised.
pub const PRESERVER_ALGEBRAS: [&str; 4] = ["matrix:3", "matrix:4", "sum:matrix:3+matrix:4", "albert"];

// ---------------------------------------------------------------- elements

fn summand_unit(alg: &JordanAlgebra, r: &Range<usize>) -> CVector {
    let mut p = alg.zero();
    for i in r.clone() {
        p[i] = alg.unit()[i];
    }
    p
}

/// Every summand is a known factor, so the center is spanned by summand units.
fn factor_units(alg: &JordanAlgebra) -> Option<Vec<CVector>> {
    if alg.summands().iter().any(|s| s.family == Family::Custom) {
        return None;
    }
    Some(alg.summands().iter().map(|s| summand_unit(alg, &s.range())).collect())
}

pub fn random_element(alg: &JordanAlgebra, seed: u64) -> CVector {
    random_vector(&mut rng_from_seed(seed), alg.dim(), 1.0)
}

pub fn random_central(alg: &JordanAlgebra, seed: u64) -> CVector {
    let mut rng = rng_from_seed(seed);
    alg.center().iter().fold(alg.zero(), |acc, z| acc + z * random_scalar(&mut rng, 1.0))
}

/// Central element with coefficients of modulus in `[0.5, 1.5]` on summand units,
/// so its inverse stays well conditioned.
pub fn random_central_invertible(alg: &JordanAlgebra, seed: u64, tol: &Tolerance) -> Result<CVector, GenError> {
    central_invertible(alg, seed, false, tol)
}

fn central_invertible(alg: &JordanAlgebra, seed: u64, self_adjoint: bool, tol: &Tolerance) -> Result<CVector, GenError> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_RETRIES {
        let z = match factor_units(alg) {
            Some(units) => units.iter().fold(alg.zero(), |acc, p| {
                let r = rng.gen_range(0.5..1.5);
                let c = if self_adjoint {
                    C64::new(if rng.gen_bool(0.5) { r } else { -r }, 0.0)
                } else {
                    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                };
                acc + p * c
            }),
            None => {
                let z = alg.center().iter().fold(alg.zero(), |acc, b| acc + b * random_scalar(&mut rng, 1.0));
                if self_adjoint {
                    (&z + alg.star(&z)) * C64::new(0.5, 0.0)
                } else {
                    z
                }
            }
        };
        if let Ok(inv) = alg.jordan_inverse(&z, tol) {
            if max_abs(inv.iter()) < 1e3 {
                return Ok(z);
            }
        }
    }
    Err(GenError::RetriesExhausted(format!("invertible central element in {}", alg.name())))
}

/// `2p − 1` with `p = Q·diag(1,…,1,0,…,0)·Q*` and `Q` unitary.
fn random_matrix_symmetry(n: usize, rng: &mut impl Rng) -> CMatrix {
    let q = random_matrix(rng, n, n, 1.0).qr().q();
    let rank = rng.gen_range(1..n);
    let mut d = CMatrix::zeros(n, n);
    for i in 0..rank {
        d[(i, i)] = ONE;
    }
    let p = &q * d * q.adjoint();
    let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    p * C64::new(2.0, 0.0) - CMatrix::identity(n, n)
}

fn random_symmetry(alg: &JordanAlgebra, rng: &mut impl Rng) -> Result<CVector, GenError> {
    let mut s = alg.zero();
    for sm in alg.summands() {
        let local: CVector = match sm.family {
            Family::Matrix(n) => matrix_coords(&random_matrix_symmetry(n, rng)),
            Family::Spin(k) => {
                let cat = spin_symmetry_catalog(k);
                cat[rng.gen_range(0..cat.len())].clone()
            }
            Family::Albert => {
                let cat = albert_symmetry_catalog();
                cat[rng.gen_range(0..cat.len())].clone()
            }
            Family::Scalar => CVector::from_vec(vec![ONE]),
            Family::Custom => return Err(GenError::CatalogEmpty(alg.name().to_string())),
        };
        s.rows_mut(sm.offset, sm.dim).copy_from(&local);
    }
    Ok(s)
}

/// Product of `word_length` operators `U_s` for symmetries drawn per summand.
pub fn random_inner_automorphism(alg: &JordanAlgebra, word_length: usize, seed: u64) -> Result<CMatrix, GenError> {
    let mut rng = rng_from_seed(seed);
    let mut out = CMatrix::identity(alg.dim(), alg.dim());
    for _ in 0..word_length {
        let s = random_symmetry(alg, &mut rng)?;
        out = alg.u(&s) * out;
    }
    Ok(out)
}

/// Permutation exchanging the first two structurally identical summands.
pub fn summand_swap(alg: &JordanAlgebra, tol: &Tolerance) -> Option<CMatrix> {
    let sm = alg.summands();
    for a in 0..sm.len() {
        for b in (a + 1)..sm.len() {
            if sm[a].family != sm[b].family || sm[a].dim != sm[b].dim {
                continue;
            }
            let mut p = CMatrix::identity(alg.dim(), alg.dim());
            for i in 0..sm[a].dim {
                let (x, y) = (sm[a].offset + i, sm[b].offset + i);
                p.swap_columns(x, y);
            }
            if homomorphism_residual(alg, alg, &p) <= tol.abs_eps {
                return Some(p);
            }
        }
    }
    None
}

// ---------------------------------------------------------------- standard forms

fn center_valued(alg: &JordanAlgebra, rng: &mut impl Rng, magnitude: f64) -> CMatrix {
    let n = alg.dim();
    let mut mu = CMatrix::zeros(n, n);
    for z in alg.center() {
        let phi = random_vector(rng, n, magnitude);
        mu += z * phi.transpose();
    }
    mu
}

fn center_valued_bilinear(alg: &JordanAlgebra, rng: &mut impl Rng, magnitude: f64) -> BilinearMap {
    let n = alg.dim();
    let coeffs: Vec<CMatrix> = alg.center().iter().map(|_| random_matrix(rng, n, n, magnitude)).collect();
    BilinearMap::symmetric_from_fn(alg.name(), n, |i, j| alg.center().iter().zip(&coeffs).fold(alg.zero(), |acc, (z, c)| acc + z * c[(i, j)]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMap {
    pub t: CMatrix,
    pub lambda: CVector,
    pub mu: CMatrix,
}

/// `T(x) = λ∘x + μ(x)` with central `λ` and center-valued `μ`.
pub fn make_associating_map(alg: &JordanAlgebra, seed: u64, magnitude: f64) -> GeneratedMap {
    let mut rng = rng_from_seed(seed);
    let lambda = alg.center().iter().fold(alg.zero(), |acc, z| acc + z * random_scalar(&mut rng, magnitude));
    let mu = center_valued(alg, &mut rng, magnitude);
    GeneratedMap { t: alg.mult_operator(&lambda) + &mu, lambda, mu }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedTrace {
    pub b: BilinearMap,
    /// Parameters a decomposition is expected to recover.
    pub lambda: CVector,
    pub mu: CMatrix,
    pub nu: BilinearMap,
    /// Extra `λ₀∘(x∘y)` term injected on algebras whose summands are all of quadratic type.
    pub lambda0: Option<CVector>,
}

/// `λ∘(x∘y) + ½(μ(x)∘y + μ(y)∘x) + ν(x,y)`.
pub fn standard_trace(alg: &JordanAlgebra, lambda: &CVector, mu: &CMatrix, nu: &BilinearMap) -> BilinearMap {
    let n = alg.dim();
    let m_lambda = alg.mult_operator(lambda);
    let m_mu: Vec<CMatrix> = (0..n).map(|i| alg.mult_operator(&mu.column(i).into_owned())).collect();
    let half = C64::new(0.5, 0.0);
    BilinearMap::symmetric_from_fn(alg.name(), n, |i, j| {
        let mut v = nu.get(i, j) + (m_mu[i].column(j) + m_mu[j].column(i)) * half;
        for &(k, c) in alg.structure(i, j) {
            v += m_lambda.column(k) * c;
        }
        v
    })
}

/// On quadratic-type summands `λ₀∘(x∘y) = ½(λ₀t(x)∘y + λ₀t(y)∘x) − λ₀ n(x,y)`,
/// so an injected `λ₀` moves into `μ` and `ν`.
fn absorb_quadratic(alg: &JordanAlgebra, lambda0: &CVector, mu: &mut CMatrix, nu: &BilinearMap) -> Option<BilinearMap> {
    let mut forms = Vec::new();
    for s in alg.summands() {
        forms.push((s.range(), quadratic_forms(&s.family)?));
    }
    let mut shift = BilinearMap::symmetric_from_fn(alg.name(), alg.dim(), |_, _| alg.zero());
    for (r, (t, q)) in &forms {
        let l0 = summand_unit(alg, r).component_mul(lambda0);
        for (a, i) in r.clone().enumerate() {
            let col = mu.column(i) + &l0 * t[a];
            mu.set_column(i, &col);
        }
        shift = shift.map_values(|i, j, v| if r.contains(&i) && r.contains(&j) { v - &l0 * q[(i - r.start, j - r.start)] } else { v.clone() });
    }
    Some(nu.map_values(|i, j, v| v + shift.get(i, j)))
}

pub fn make_associating_trace(alg: &JordanAlgebra, seed: u64, magnitude: f64) -> GeneratedTrace {
    let mut rng = rng_from_seed(seed);
    let lambda = alg.center().iter().fold(alg.zero(), |acc, z| acc + z * random_scalar(&mut rng, magnitude));
    let mut mu = center_valued(alg, &mut rng, magnitude);
    let nu = center_valued_bilinear(alg, &mut rng, magnitude);
    let b = standard_trace(alg, &lambda, &mu, &nu);
    match absorb_quadratic(alg, &lambda, &mut mu, &nu) {
        Some(nu) => GeneratedTrace { b, lambda: alg.zero(), mu, nu, lambda0: Some(lambda) },
        None => GeneratedTrace { b, lambda, mu, nu, lambda0: None },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPreserver {
    pub phi: CMatrix,
    pub z0: CVector,
    pub j: CMatrix,
    pub beta: CMatrix,
}

/// `Φ = z₀∘J + β`, resampled until `Φ` is invertible. The symmetric variant
/// uses a self-adjoint `z₀` and a ♯-symmetric `β`.
pub fn make_standard_preserver(alg: &JordanAlgebra, seed: u64, symmetric: bool, tol: &Tolerance) -> Result<GeneratedPreserver, GenError> {
    for attempt in 0..MAX_RETRIES as u64 {
        let cell = derive_seed(seed, attempt);
        let z0 = central_invertible(alg, derive_seed(cell, 0), symmetric, tol)?;
        let mut j = random_inner_automorphism(alg, 3, derive_seed(cell, 1))?;
        let mut rng = rng_from_seed(derive_seed(cell, 2));
        if rng.gen_bool(0.5) {
            if let Some(swap) = summand_swap(alg, tol) {
                j = swap * j;
            }
        }
        let mut beta = center_valued(alg, &mut rng, 0.5);
        if symmetric {
            beta = (&beta + sharp(&beta, alg, alg)) * C64::new(0.5, 0.0);
        }
        let phi = alg.mult_operator(&z0) * &j + &beta;
        let sv = phi.singular_values();
        if sv.min() > 1e-6 * sv.max() {
            return Ok(GeneratedPreserver { phi, z0, j, beta });
        }
    }
    Err(GenError::RetriesExhausted(format!("invertible preserver on {}", alg.name())))
}

// ---------------------------------------------------------------- adversarial

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialKind {
    NonAssociating,
    NonCentralMu,
    SpinGenericBijection,
    BrokenJ,
}

impl FromStr for AdversarialKind {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "non_associating" => Ok(AdversarialKind::NonAssociating),
            "non_central_mu" => Ok(AdversarialKind::NonCentralMu),
            "spin_generic_bijection" => Ok(AdversarialKind::SpinGenericBijection),
            "broken_J" | "broken_j" => Ok(AdversarialKind::BrokenJ),
            other => Err(GenError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Adversarial {
    /// `T = M_c` with `c` non-central.
    Map(CMatrix),
    /// An associating `T` with a claimed form whose `μ` is not center-valued.
    ClaimedForm { t: CMatrix, lambda: CVector, mu: CMatrix },
    /// Invertible map with `Φ(1) ∉ C1`.
    Bijection(CMatrix),
    /// A valid preserver whose recorded `J` is off by `1e-3`.
    Preserver(GeneratedPreserver),
}

fn non_central(alg: &JordanAlgebra, rng: &mut impl Rng) -> CVector {
    let x = random_vector(rng, alg.dim(), 1.0);
    &x - alg.center_projection(&x)
}

pub fn make_adversarial(kind: AdversarialKind, alg: &JordanAlgebra, seed: u64, tol: &Tolerance) -> Result<Adversarial, GenError> {
    let mut rng = rng_from_seed(seed);
    match kind {
        AdversarialKind::NonAssociating => Ok(Adversarial::Map(alg.mult_operator(&non_central(alg, &mut rng)))),
        AdversarialKind::NonCentralMu => {
            let g = make_associating_map(alg, seed, 1.0);
            let mut t = g.t;
            // Make sure λ is not zero so that M_λ is visibly non-central.
            t += alg.mult_operator(alg.unit());
            Ok(Adversarial::ClaimedForm { mu: t.clone(), t, lambda: alg.zero() })
        }
        AdversarialKind::SpinGenericBijection => {
            let n = alg.dim();
            for _ in 0..MAX_RETRIES {
                let mut phi = random_matrix(&mut rng, n, n, 1.0);
                let image = alg.unit() + non_central(alg, &mut rng);
                phi.set_column(0, &image);
                let sv = phi.singular_values();
                if sv.min() > 1e-6 * sv.max() {
                    return Ok(Adversarial::Bijection(phi));
                }
            }
            Err(GenError::RetriesExhausted("generic bijection".into()))
        }
        AdversarialKind::BrokenJ => {
            let mut g = make_standard_preserver(alg, seed, false, tol)?;
            let n = alg.dim();
            g.j[(rng.gen_range(0..n), rng.gen_range(0..n))] += C64::new(1e-3, 0.0);
            Ok(Adversarial::Preserver(g))
        }
    }
}

// ---------------------------------------------------------------- suites

struct Ctx<'a> {
    config: &'a GenConfig,
    tol: &'a Tolerance,
    records: Vec<Record>,
}

impl Ctx<'_> {
    fn seed(&self, tag: &str, alg: &str, index: usize) -> u64 {
        let h = tag.bytes().chain(alg.bytes()).fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        derive_seed(derive_seed(self.config.master_seed, h), index as u64)
    }

    fn eps(&self) -> f64 {
        self.tol.abs_eps
    }

    fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    fn mixes_control(&self, seed: u64) -> bool {
        self.config.adversarial_rate > 0.0 && rng_from_seed(derive_seed(seed, 0xad)).gen_bool(self.config.adversarial_rate.min(1.0))
    }
}

/// Recovery tolerance for generator parameters.
pub const RECOVERY_TOL: f64 = 1e-8;

/// Runs a suite with the default tolerance.
pub fn run_suite(name: &str, config: &GenConfig) -> Result<Report, GenError> {
    run_suite_with(name, config, &Tolerance::default())
}

pub fn run_suite_with(name: &str, config: &GenConfig, tol: &Tolerance) -> Result<Report, GenError> {
    let mut ctx = Ctx { config, tol, records: Vec::new() };
    match name {
        "axioms" => suite_axioms(&mut ctx)?,
        "kits" => suite_kits(&mut ctx)?,
        "topping" => suite_topping(&mut ctx)?,
        "spin_commutant" => suite_spin_commutant(&mut ctx)?,
        "bresar_identities" => suite_bresar(&mut ctx)?,
        "capelli_agreement" => suite_capelli(&mut ctx)?,
        "central_annihilator" => suite_central_annihilator(&mut ctx)?,
        "decompose_linear_roundtrip" => suite_linear(&mut ctx)?,
        "decompose_trace_roundtrip" => suite_trace(&mut ctx)?,
        "preserver_roundtrip" => suite_preserver(&mut ctx, false)?,
        "preserver_symmetric" => suite_preserver(&mut ctx, true)?,
        "negative_controls" => suite_negative(&mut ctx)?,
        "mixed_products" => suite_mixed(&mut ctx)?,
        other => return Err(GenError::UnknownSuite(other.to_string())),
    }
    let mut cfg = serde_json::to_value(config).expect("config serializes");
    cfg["tol_abs"] = serde_json::json!(tol.abs_eps);
    Ok(Report::new(name, cfg, ctx.records))
}

fn load(names: &[&str]) -> Result<Vec<JordanAlgebra>, GenError> {
    names.iter().map(|n| by_name(n).map_err(GenError::from)).collect()
}

fn suite_axioms(ctx: &mut Ctx) -> Result<(), GenError> {
    let names = ["scalar", "matrix:2", "matrix:3", "matrix:4", "spin:3", "spin:5", "albert", "sum:matrix:2+spin:3", "func:matrix:2:3"];
    for alg in load(&names)? {
        let seed = ctx.seed("axioms", alg.name(), 0);
        let recs = check_axioms(&alg, ctx.config.samples.clamp(1, 20), seed, ctx.tol);
        ctx.records.extend(recs);
    }
    Ok(())
}

fn suite_kits(ctx: &mut Ctx) -> Result<(), GenError> {
    for alg in load(&KIT_ALGEBRAS)? {
        for (variant, label) in [(Variant::Primary, "primary"), (Variant::Alternative, "alternative")] {
            let seed = ctx.seed("kits", alg.name(), variant as usize);
            let kit = build_kit_variant(&alg, variant, ctx.tol)?;
            for mut r in verify_kit(&alg, &kit, ctx.tol, seed) {
                r.check_name = format!("{label}/{}", r.check_name);
                ctx.push(r);
            }
        }
    }
    Ok(())
}

fn suite_topping(ctx: &mut Ctx) -> Result<(), GenError> {
    let sizes = [2usize, 3, 4, 5];
    let random_total = ctx.config.samples;
    let constructed_total = (ctx.config.samples / 20).max(1);
    for (idx, &n) in sizes.iter().enumerate() {
        let alg = by_name(&format!("matrix:{n}"))?;
        let share = |total: usize| total / sizes.len() + usize::from(idx < total % sizes.len());
        for (kind, count) in [("random_pairs", share(random_total)), ("commuting_pairs", share(constructed_total))] {
            let seed = ctx.seed("topping", kind, n);
            let mut disagreements = 0usize;
            let mut commuting = 0usize;
            for s in 0..count {
                let mut rng = rng_from_seed(derive_seed(seed, s as u64));
                let x = random_matrix(&mut rng, n, n, 1.0);
                let y = if kind == "random_pairs" {
                    random_matrix(&mut rng, n, n, 1.0)
                } else {
                    let x2 = &x * &x;
                    CMatrix::identity(n, n) * random_scalar(&mut rng, 1.0) + &x * random_scalar(&mut rng, 1.0) + &x2 * random_scalar(&mut rng, 1.0) + &x2 * &x * random_scalar(&mut rng, 1.0)
                };
                let assoc = max_abs((&x * &y - &y * &x).iter()) <= ctx.eps();
                let op = alg.operator_commute(&matrix_coords(&x), &matrix_coords(&y), ctx.tol);
                commuting += usize::from(assoc);
                disagreements += usize::from(assoc != op);
            }
            let detail = format!("{count} pairs, {commuting} commuting, {disagreements} disagreements");
            ctx.push(Record::new(&format!("agreement_{kind}"), alg.name(), seed, disagreements as f64, 0.0, detail));
        }
    }
    Ok(())
}

/// Distance of each vector in `a` to `span(b)`, for orthonormal `b`.
fn span_residual(a: &[CVector], b: &[CVector]) -> f64 {
    a.iter()
        .map(|v| {
            let mut r = v.clone();
            for w in b {
                r -= w * w.dotc(v);
            }
            max_abs(r.iter())
        })
        .fold(0.0, f64::max)
}

fn orthonormalize(vs: &[CVector]) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vs {
        let mut r = v.clone();
        for w in &out {
            r -= w * w.dotc(&r);
        }
        let n = r.norm();
        if n > 1e-12 {
            out.push(r / C64::new(n, 0.0));
        }
    }
    out
}

fn suite_spin_commutant(ctx: &mut Ctx) -> Result<(), GenError> {
    for alg in load(&["spin:4", "spin:6"])? {
        for s in 0..ctx.config.samples {
            let seed = ctx.seed("spin_commutant", alg.name(), s);
            let x = non_central(&alg, &mut rng_from_seed(seed));
            let com = orthonormalize(&alg.commutant(&x, ctx.tol));
            let target = orthonormalize(&[alg.unit().clone(), x.clone()]);
            let residual = span_residual(&com, &target).max(span_residual(&target, &com));
            ctx.push(Record::boolean("commutant_dim", alg.name(), seed, com.len() == 2, format!("dimension {}", com.len())));
            ctx.push(Record::new("commutant_span", alg.name(), seed, residual, ctx.eps(), "commutant equals span{1, x}"));
        }
    }
    Ok(())
}

fn suite_bresar(ctx: &mut Ctx) -> Result<(), GenError> {
    let per_algebra = (ctx.config.samples / 20).max(1);
    for alg in load(&KIT_ALGEBRAS)? {
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..per_algebra {
            let seed = ctx.seed("bresar", alg.name(), s);
            let g = make_associating_trace(&alg, seed, ctx.config.magnitude);
            if decompose_trace(&alg, &g.b, &kit, ctx.tol).is_err() {
                ctx.push(Record::boolean("trace_accepted", alg.name(), seed, false, "generated trace rejected"));
                continue;
            }
            ctx.push(Record::new("cyclic_identity", alg.name(), seed, trace_associating_residual(&alg, &g.b), ctx.eps(), "all basis triples"));
            ctx.push(Record::new("polarized_identity", alg.name(), seed, bresar_polarized_residual(&alg, &g.b), ctx.eps(), "all basis pairs"));
        }
    }
    let sizes = [2usize, 3, 4];
    for (idx, &n) in sizes.iter().enumerate() {
        let alg = by_name(&format!("matrix:{n}"))?;
        let seed = ctx.seed("associative_identity", alg.name(), 0);
        let g = make_associating_trace(&alg, seed, ctx.config.magnitude);
        let b = |x: &CMatrix, y: &CMatrix| matrix_of(&g.b.eval(&matrix_coords(x), &matrix_coords(y)), n);
        let count = ctx.config.samples / sizes.len() + usize::from(idx < ctx.config.samples % sizes.len());
        let mut worst = 0.0f64;
        for s in 0..count {
            let mut rng = rng_from_seed(derive_seed(seed, s as u64 + 1));
            let x = random_matrix(&mut rng, n, n, 1.0);
            let y = random_matrix(&mut rng, n, n, 1.0);
            worst = worst.max(associative_identity_residual(&x, &y, b));
        }
        ctx.push(Record::new("associative_identity", alg.name(), seed, worst, RECOVERY_TOL, format!("{count} random pairs")));
    }
    Ok(())
}

fn suite_capelli(ctx: &mut Ctx) -> Result<(), GenError> {
    let total = ctx.config.samples;
    let dependent_total = total / 5;
    for (idx, n) in [3usize, 4].into_iter().enumerate() {
        let name = format!("matrix:{n}");
        let count = total / 2 + usize::from(idx < total % 2);
        let dependent = dependent_total / 2 + usize::from(idx < dependent_total % 2);
        let seed = ctx.seed("capelli", &name, 0);
        let mut disagreements = 0usize;
        let mut independent = 0usize;
        for s in 0..count {
            let cell = derive_seed(seed, s as u64);
            let mut rng = rng_from_seed(cell);
            let arity = rng.gen_range(2..=5);
            let mut tuple: Vec<CMatrix> = (0..arity).map(|_| random_matrix(&mut rng, n, n, 1.0)).collect();
            if s < dependent {
                let combo = tuple[..arity - 1].iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m * random_scalar(&mut rng, 1.0));
                tuple[arity - 1] = combo;
            }
            let cap = independence_capelli(&tuple, 8, derive_seed(cell, 1), ctx.tol).expect("arity within guard");
            let gram = independence_gram(&tuple, ctx.tol);
            independent += usize::from(gram);
            disagreements += usize::from(cap != gram);
        }
        let detail = format!("{count} tuples, {dependent} forced dependent, {independent} independent by Gram");
        ctx.push(Record::new("capelli_vs_gram", &name, seed, disagreements as f64, 0.0, detail));
    }
    for alg in load(&["matrix:3", "matrix:4", "matrix:5", "sum:matrix:3+matrix:4"])? {
        for (variant, label) in [(Variant::Primary, "primary"), (Variant::Alternative, "alternative")] {
            let seed = ctx.seed("capelli_kit", alg.name(), variant as usize);
            let kit = build_kit_variant(&alg, variant, ctx.tol)?;
            let ok = match kit_commutator_triple(&alg, &kit) {
                Some(triple) => independence_capelli(&triple, 8, seed, ctx.tol).unwrap_or(false) && independence_gram(&triple, ctx.tol),
                None => false,
            };
            ctx.push(Record::boolean(&format!("kit_triple_independent/{label}"), alg.name(), seed, ok, "{[u^2,v], [u,v^2], [u,v]}"));
        }
    }
    Ok(())
}

fn suite_central_annihilator(ctx: &mut Ctx) -> Result<(), GenError> {
    let cases = [
        ("matrix:3", true),
        ("spin:4", true),
        ("albert", true),
        ("sum:matrix:3+matrix:4", true),
        ("func:matrix:2:3", true),
        ("sum:scalar+matrix:2", false),
        ("sum:scalar+spin:3", false),
        ("sum:matrix:2+scalar+scalar", false),
    ];
    for (name, expected) in cases {
        let alg = by_name(name)?;
        let got = central_annihilator_check(&alg, ctx.tol);
        ctx.push(Record::boolean("annihilator_trivial", name, 0, got == expected, format!("expected {expected}, got {got}")));
    }
    Ok(())
}

fn suite_linear(ctx: &mut Ctx) -> Result<(), GenError> {
    for alg in load(&KIT_ALGEBRAS)? {
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..ctx.config.samples {
            let seed = ctx.seed("linear", alg.name(), s);
            if ctx.mixes_control(seed) {
                let Adversarial::Map(t) = make_adversarial(AdversarialKind::NonAssociating, &alg, seed, ctx.tol)? else { unreachable!() };
                let res = decompose_linear(&alg, &t, &kit, ctx.tol);
                let detected = matches!(res, Err(DecomposeError::NotAssociating(_)));
                ctx.push(Record::control("control_non_associating", alg.name(), seed, 0.0, ctx.eps(), detected, format!("{res:?}").chars().take(80).collect::<String>()));
                continue;
            }
            let g = make_associating_map(&alg, seed, ctx.config.magnitude);
            if s < 2 {
                ctx.push(Record::new("generated_associating", alg.name(), seed, linear_associating_residual(&alg, &g.t), ctx.eps(), "generator soundness"));
            }
            match decompose_linear(&alg, &g.t, &kit, ctx.tol) {
                Ok(f) => {
                    let err = max_abs((&f.lambda - &g.lambda).iter()).max(max_abs((&f.mu - &g.mu).iter()));
                    ctx.push(Record::new("linear_recovery", alg.name(), seed, err, RECOVERY_TOL, "max coordinate error of (lambda, mu)"));
                    ctx.push(Record::new("linear_residual", alg.name(), seed, f.residual, ctx.eps(), "T - (lambda o x + mu)"));
                }
                Err(e) => ctx.push(Record::boolean("linear_recovery", alg.name(), seed, false, e.to_string())),
            }
        }
    }
    Ok(())
}

fn suite_trace(ctx: &mut Ctx) -> Result<(), GenError> {
    for alg in load(&KIT_ALGEBRAS)? {
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..ctx.config.samples {
            let seed = ctx.seed("trace", alg.name(), s);
            let g = make_associating_trace(&alg, seed, ctx.config.magnitude);
            match decompose_trace(&alg, &g.b, &kit, ctx.tol) {
                Ok(f) => {
                    let err = max_abs((&f.lambda - &g.lambda).iter()).max(max_abs((&f.mu - &g.mu).iter())).max(f.nu.max_abs_diff(&g.nu));
                    ctx.push(Record::new("trace_recovery", alg.name(), seed, err, RECOVERY_TOL, "max coordinate error of (lambda, mu, nu)"));
                    ctx.push(Record::new("trace_residual", alg.name(), seed, f.residual, ctx.eps(), "standard form on all basis pairs"));
                    if g.lambda0.is_some() {
                        ctx.push(Record::new("spin_lambda_zero", alg.name(), seed, max_abs(f.lambda.iter()), 1e-10, "injected lambda0 o x^2 absorbed"));
                    }
                }
                Err(e) => ctx.push(Record::boolean("trace_recovery", alg.name(), seed, false, e.to_string())),
            }
        }
    }
    Ok(())
}

fn decomposition_error(d: &PreserverDecomposition, g: &GeneratedPreserver) -> f64 {
    max_abs((&d.z0 - &g.z0).iter()).max(max_abs((&d.j - &g.j).iter())).max(max_abs((&d.beta - &g.beta).iter()))
}

fn decomposition_distance(a: &PreserverDecomposition, b: &PreserverDecomposition) -> f64 {
    max_abs((&a.z0 - &b.z0).iter()).max(max_abs((&a.j - &b.j).iter())).max(max_abs((&a.beta - &b.beta).iter()))
}

fn suite_preserver(ctx: &mut Ctx, symmetric: bool) -> Result<(), GenError> {
    let tag = if symmetric { "preserver_symmetric" } else { "preserver" };
    let count = if symmetric { ctx.config.samples.div_ceil(2) } else { ctx.config.samples };
    for alg in load(&PRESERVER_ALGEBRAS)? {
        let kit = build_kit(&alg, ctx.tol)?;
        let alt = build_kit_variant(&alg, Variant::Alternative, ctx.tol)?;
        let per_algebra = if symmetric { count / PRESERVER_ALGEBRAS.len() + 1 } else { count };
        for s in 0..per_algebra {
            let seed = ctx.seed(tag, alg.name(), s);
            let g = make_standard_preserver(&alg, seed, symmetric, ctx.tol)?;
            let d = match decompose_preserver(&alg, &alg, &g.phi, &kit, PreserverMode::Guarded, ctx.tol) {
                Ok(d) => d,
                Err(e) => {
                    ctx.push(Record::boolean("preserver_recovery", alg.name(), seed, false, e.to_string()));
                    continue;
                }
            };
            ctx.push(Record::new("preserver_recovery", alg.name(), seed, decomposition_error(&d, &g), RECOVERY_TOL, "max error of (z0, J, beta)"));
            if symmetric {
                ctx.records.extend(symmetric_preserver_check(&alg, &alg, &d, seed, ctx.tol));
                continue;
            }
            ctx.push(Record::new("j_homomorphism", alg.name(), seed, homomorphism_residual(&alg, &alg, &d.j), ctx.eps(), "J(x o y) = J(x) o J(y)"));
            let sv = d.j.singular_values();
            ctx.push(Record::boolean("j_invertible", alg.name(), seed, sv.min() > ctx.eps() * sv.max().max(1.0), format!("sigma_min {:.3e}", sv.min())));
            let uniqueness = match decompose_preserver(&alg, &alg, &g.phi, &alt, PreserverMode::Guarded, ctx.tol) {
                Ok(d2) => decomposition_distance(&d, &d2),
                Err(_) => f64::INFINITY,
            };
            ctx.push(Record::new("uniqueness_two_kits", alg.name(), seed, uniqueness, RECOVERY_TOL, "primary vs alternative kit"));
            ctx.push(Record::new("central_compatibility", alg.name(), seed, central_compatibility_residual(&alg, &alg, &g.phi, &d.j), ctx.eps(), "Phi(z o a) - J(z) o Phi(a) central"));
            if s < 2 {
                let summary = opcomm_preservation_sampled(&alg, &alg, &g.phi, 12, seed, ctx.tol);
                ctx.push(Record::new("opcomm_preserved", alg.name(), seed, summary.worst, ctx.eps(), format!("{}/{} pairs", summary.passed, summary.checked)));
            }
        }
    }
    Ok(())
}

fn suite_negative(ctx: &mut Ctx) -> Result<(), GenError> {
    let eps = ctx.eps();
    let reps = (ctx.config.samples / 50).max(1);
    for name in ["matrix:2", "matrix:3", "spin:4", "albert"] {
        let alg = by_name(name)?;
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..reps {
            let seed = ctx.seed("negative_non_associating", name, s);
            let Adversarial::Map(t) = make_adversarial(AdversarialKind::NonAssociating, &alg, seed, ctx.tol)? else { unreachable!() };
            let res = decompose_linear(&alg, &t, &kit, ctx.tol);
            let residual = linear_associating_residual(&alg, &t);
            let detected = matches!(res, Err(DecomposeError::NotAssociating(_)));
            ctx.push(Record::control("non_associating_linear", name, seed, residual, eps, detected, "expects NotAssociating"));
            let c = &t * alg.unit();
            let b = BilinearMap::jordan_product(&alg).map_values(|_, _, v| alg.product(&c, v));
            let res = decompose_trace(&alg, &b, &kit, ctx.tol);
            let detected = matches!(res, Err(DecomposeError::NotAssociating(_)));
            ctx.push(Record::control("non_associating_trace", name, seed, trace_associating_residual(&alg, &b), eps, detected, "expects NotAssociating"));
            let Adversarial::ClaimedForm { t, lambda, mu } = make_adversarial(AdversarialKind::NonCentralMu, &alg, seed, ctx.tol)? else { unreachable!() };
            let check = validate_linear_form(&alg, &t, &lambda, &mu);
            let detected = check.reproduces <= eps && check.lambda_central <= eps && check.mu_center_valued > eps;
            ctx.push(Record::control("non_central_mu", name, seed, check.mu_center_valued, eps, detected, "only center-valuedness fails"));
        }
    }
    for name in ["spin:4", "spin:6"] {
        let alg = by_name(name)?;
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..reps {
            let seed = ctx.seed("negative_spin", name, s);
            let Adversarial::Bijection(phi) = make_adversarial(AdversarialKind::SpinGenericBijection, &alg, seed, ctx.tol)? else { unreachable!() };
            let res = decompose_preserver(&alg, &alg, &phi, &kit, PreserverMode::SpinBypass, ctx.tol);
            let (residual, detected) = match res {
                Err(DecomposeError::JNotMultiplicative(r)) => (r, true),
                _ => (0.0, false),
            };
            ctx.push(Record::control("spin_generic_bijection", name, seed, residual, eps, detected, "expects JNotMultiplicative"));
            let guarded = decompose_preserver(&alg, &alg, &phi, &kit, PreserverMode::Guarded, ctx.tol);
            ctx.push(Record::control("spin_kit_guard", name, seed, 0.0, eps, matches!(guarded, Err(DecomposeError::KitMissing(_))), "expects KitMissing"));
        }
    }
    for name in ["matrix:3", "albert"] {
        let alg = by_name(name)?;
        let kit = build_kit(&alg, ctx.tol)?;
        for s in 0..reps {
            let seed = ctx.seed("negative_broken_j", name, s);
            let Adversarial::Preserver(g) = make_adversarial(AdversarialKind::BrokenJ, &alg, seed, ctx.tol)? else { unreachable!() };
            let (err, detected) = match decompose_preserver(&alg, &alg, &g.phi, &kit, PreserverMode::Guarded, ctx.tol) {
                Ok(d) => {
                    let e = decomposition_error(&d, &g);
                    (e, e > RECOVERY_TOL)
                }
                Err(_) => (0.0, false),
            };
            ctx.push(Record::control("broken_j_roundtrip", name, seed, err, RECOVERY_TOL, detected, "decomposes, but disagrees with recorded J"));
        }
    }
    for name in ["sum:scalar+matrix:2", "sum:scalar+spin:3"] {
        let alg = by_name(name)?;
        let detected = !central_annihilator_check(&alg, ctx.tol);
        ctx.push(Record::control("one_dim_summand_annihilator", name, 0, 0.0, eps, detected, "expects a nonzero central annihilator"));
        let kit = build_kit(&alg, ctx.tol);
        ctx.push(Record::control("one_dim_summand_kit", name, 0, 0.0, eps, matches!(kit, Err(KitError::FrameInvalid(_))), "expects FrameInvalid"));
    }
    Ok(())
}

fn suite_mixed(ctx: &mut Ctx) -> Result<(), GenError> {
    let reps = (ctx.config.samples / 10).max(1);
    for alg in load(&["sum:matrix:3+matrix:4", "func:albert:2"])? {
        let kit: ElementaryKit = build_kit(&alg, ctx.tol)?;
        for s in 0..reps {
            let seed = ctx.seed("mixed", alg.name(), s);
            let g = make_associating_map(&alg, seed, ctx.config.magnitude);
            ctx.push(Record::new("cross_block_linear", alg.name(), seed, cross_block_linear_residual(&alg, &g.t), ctx.eps(), "M_p T M_q center-valued"));
            let tr = make_associating_trace(&alg, derive_seed(seed, 1), ctx.config.magnitude);
            ctx.push(Record::new("cross_block_trace", alg.name(), seed, cross_block_trace_residual(&alg, &tr.b), ctx.eps(), "p o B(qx, qx) central"));
            for p in 0..alg.summands().len() {
                let f = mixed_product_form(&alg, p, &tr.b, &kit);
                ctx.push(Record::new(&format!("mixed_product_form_p{p}"), alg.name(), seed, f.residual.max(f.central), ctx.eps(), "p o B(a, b) = mu(b) o a + nu(a, b)"));
            }
        }
    }
    Ok(())
}

/// Star residual of a generated automorphism, exposed for tests and the CLI.
pub fn automorphism_residuals(alg: &JordanAlgebra, j: &CMatrix) -> (f64, f64) {
    (homomorphism_residual(alg, alg, j), star_map_residual(alg, alg, j))
}

/// All commuting sample pairs used by the preservation check, for inspection.
pub fn sample_commuting_pairs(alg: &JordanAlgebra, samples: usize, seed: u64) -> Vec<(CVector, CVector)> {
    commuting_pairs(alg, samples, seed)
}
