//! The finite quadratic module A_Δ = 𝔡⁻¹/O_F, its involutions σ_p, genus
//! characters, the invariants d(h), d0 and s_h, the sqrt(𝔞, h) support and
//! the counting function ρ_{K/F}.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, kronecker};
use crate::error::{invalid, Result};
use crate::qfield::{factor_ideal, FieldElem, FracIdeal, NarrowClassGroup, QuadField};

/// (a + bω)/√Δ with a mod Δ/gcd(Δ,2) and b mod gcd(Δ,2).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FQMElem {
    pub a: i64,
    pub b: i64,
    pub disc: i64,
}

fn moduli(disc: i64) -> (i64, i64) {
    let g = gcd(disc, 2);
    (disc / g, g)
}

impl FQMElem {
    pub fn new(a: i64, b: i64, disc: i64) -> Self {
        let (n, g) = moduli(disc);
        FQMElem {
            a: a.rem_euclid(n),
            b: b.rem_euclid(g),
            disc,
        }
    }

    pub fn zero(disc: i64) -> Self {
        FQMElem::new(0, 0, disc)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Every element of A_Δ, in lexicographic order.
    pub fn all(disc: i64) -> Vec<FQMElem> {
        let (n, g) = moduli(disc);
        let mut out = Vec::with_capacity(disc as usize);
        for a in 0..n {
            for b in 0..g {
                out.push(FQMElem { a, b, disc });
            }
        }
        out
    }

    /// Class of μ/√Δ, for μ integral at the primes dividing Δ.
    pub fn from_numerator(mu: &FieldElem) -> Option<Self> {
        let disc = mu.disc;
        let (u, v) = mu.omega_coords_rat();
        let t = u.denom().lcm(v.denom());
        let t64 = t.to_i64()?;
        if gcd(t64, disc) != 1 {
            return None;
        }
        let (n, _) = moduli(disc);
        let tr = BigRational::from_integer(t.clone());
        let a = reduce_big(&(u * &tr).to_integer(), n);
        let b = reduce_big(&(v * &tr).to_integer(), n);
        let tinv = mod_inverse(t64.rem_euclid(n), n).expect("coprime denominator");
        Some(FQMElem::new(a, b, disc).scale(tinv))
    }

    /// A lift μ ∈ O_F with μ/√Δ in this class.
    pub fn numerator(&self) -> FieldElem {
        FieldElem::from_omega_coords(&BigInt::from(self.a), &BigInt::from(self.b), self.disc)
    }

    /// n mod Δ with Q(h) = n/Δ mod 1.
    pub fn q_numerator(&self) -> i64 {
        let d = i128::from(self.disc);
        let a = i128::from(self.a);
        let b = i128::from(self.b);
        let nm = a * a + a * b * d + b * b * ((d * d - d) / 4);
        ((-nm).rem_euclid(d)) as i64
    }

    /// Q(h) ∈ [0, 1) as an exact rational.
    pub fn q(&self) -> BigRational {
        BigRational::new(BigInt::from(self.q_numerator()), BigInt::from(self.disc))
    }

    pub fn neg(&self) -> Self {
        FQMElem::new(-self.a, -self.b, self.disc)
    }

    pub fn add(&self, o: &Self) -> Self {
        FQMElem::new(self.a + o.a, self.b + o.b, self.disc)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        let (n, _) = moduli(self.disc);
        let k = k.rem_euclid(n) as i128;
        let a = (k * i128::from(self.a)).rem_euclid(i128::from(n)) as i64;
        let b = (k * i128::from(self.b)) as i64;
        FQMElem::new(a, b, self.disc)
    }

    /// Galois conjugation, which acts as h ↦ −h.
    pub fn conj(&self) -> Self {
        self.neg()
    }

    /// α·h for α ∈ O_F.
    pub fn mul_elem(&self, alpha: &FieldElem) -> Self {
        let (n, _) = moduli(self.disc);
        let prod = &self.numerator() * alpha;
        let (u, v) = prod.omega_coords().expect("multiplier must be integral");
        FQMElem::new(reduce_big(&u, n), reduce_big(&v, n), self.disc)
    }

    /// Projection to the p-part for p | Δ.
    pub fn p_part(&self, p: i64) -> Self {
        self.scale(idempotent(self.disc, p))
    }
}

fn reduce_big(x: &BigInt, n: i64) -> i64 {
    x.mod_floor(&BigInt::from(n)).to_i64().unwrap()
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let e = a.extended_gcd(&n);
    (e.gcd == 1).then(|| e.x.rem_euclid(n))
}

/// e ≡ 1 mod p^{v_p(N)}, e ≡ 0 mod the cofactor, N = Δ/gcd(Δ,2).
fn idempotent(disc: i64, p: i64) -> i64 {
    let (n, _) = moduli(disc);
    let pe = p.pow(arith::valuation(n, p));
    let rest = n / pe;
    // e = rest·(rest⁻¹ mod pe)
    let inv = mod_inverse(rest.rem_euclid(pe), pe).unwrap();
    (rest * inv).rem_euclid(n)
}

impl fmt::Debug for FQMElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h({}, {})", self.a, self.b)
    }
}

/// The involution σ_p on A_Δ for a prime p | Δ.
pub fn sigma_p(h: &FQMElem, p: i64) -> Result<FQMElem> {
    let disc = h.disc;
    if !arith::is_prime(p) || disc % p != 0 {
        return invalid(format!("{p} is not a prime dividing {disc}"));
    }
    let x = h.p_part(p);
    let rest = h.sub(&x);
    if p == 2 && arith::valuation(disc, 2) == 2 {
        let t = two_part_swap_axis(disc);
        let y = if x.is_zero() || x == t { x } else { x.add(&t) };
        return Ok(rest.add(&y));
    }
    Ok(rest.sub(&x))
}

/// The nonzero 2-part element with Q = 1/2 when ord₂Δ = 2.
fn two_part_swap_axis(disc: i64) -> FQMElem {
    let e = idempotent(disc, 2);
    [(1, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(a, b)| FQMElem::new(a, b, disc).scale(e))
        .find(|t| !t.is_zero() && 2 * t.q_numerator() == disc)
        .expect("2-part of A_Δ must contain an element with Q = 1/2")
}

/// σ_d = ∏_{p | d} σ_p.
pub fn sigma_d(h: &FQMElem, d: GDeltaElem) -> FQMElem {
    arith::prime_divisors(d.0)
        .into_iter()
        .fold(*h, |acc, p| sigma_p(&acc, p).expect("d divides Δ"))
}

/// An element of G_Δ: |d| for a fundamental discriminant d | Δ with gcd(d, Δ/d) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GDeltaElem(pub i64);

impl GDeltaElem {
    pub fn one() -> Self {
        GDeltaElem(1)
    }

    pub fn mul(self, o: Self) -> Self {
        let g = gcd(self.0, o.0);
        GDeltaElem(self.0 * o.0 / (g * g))
    }

    pub fn divides(self, o: Self) -> bool {
        o.0 % self.0 == 0
    }

    /// All elements of G_Δ.
    pub fn all(disc: i64) -> Vec<GDeltaElem> {
        let parts: Vec<i64> = arith::prime_discriminants(disc)
            .iter()
            .map(|q| q.abs())
            .collect();
        let mut out = Vec::with_capacity(1 << parts.len());
        for mask in 0u32..(1 << parts.len()) {
            let d = parts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, q)| *q)
                .product();
            out.push(GDeltaElem(d));
        }
        out.sort();
        out
    }

    /// Elements dividing self.
    pub fn subgroup(self, disc: i64) -> Vec<GDeltaElem> {
        GDeltaElem::all(disc)
            .into_iter()
            .filter(|e| e.divides(self))
            .collect()
    }
}

fn p_star_abs(disc: i64, p: i64) -> i64 {
    if p == 2 {
        1 << arith::valuation(disc, 2)
    } else {
        p
    }
}

/// d(h): the product of |p*| over primes p | Δ with σ_p(h) = h.
pub fn d_of(h: &FQMElem) -> GDeltaElem {
    let d = arith::prime_divisors(h.disc)
        .into_iter()
        .filter(|&p| sigma_p(h, p).unwrap() == *h)
        .map(|p| p_star_abs(h.disc, p))
        .product();
    GDeltaElem(d)
}

/// 𝔡_d = ∏_{p | d} 𝔡_p.
pub fn ramified_ideal(field: &QuadField, d: GDeltaElem) -> FracIdeal {
    arith::prime_divisors(d.0)
        .into_iter()
        .fold(field.unit_ideal(), |acc, p| {
            acc.mul(&field.ramified_prime(p).expect("p divides Δ"))
        })
}

/// The unique d0 ≠ 1 in G_Δ with 𝔡_{d0} narrowly principal.
pub fn d0(field: &QuadField) -> GDeltaElem {
    let found: Vec<GDeltaElem> = GDeltaElem::all(field.delta())
        .into_iter()
        .filter(|d| d.0 != 1 && field.is_narrowly_principal(&ramified_ideal(field, *d)))
        .collect();
    assert_eq!(found.len(), 1, "d0 must be unique, found {found:?}");
    found[0]
}

/// s_h ∈ {0, 1, 2}.
pub fn s_h(h: &FQMElem, d0: GDeltaElem, delta0: i64) -> u32 {
    let d = d_of(h);
    if d.0 % delta0 == 0 {
        0
    } else if d0.divides(d) {
        2
    } else {
        1
    }
}

/// s_h from its definition: Σ sgn(s) over coset representatives s of
/// SO(L)/Γ_Δ fixing h, drawn from {±1, ±ε_F^+}. When −ε_F^+ acts trivially
/// it lies in Γ_Δ and only ±1 are distinct cosets.
pub fn s_h_direct(h: &FQMElem, field: &QuadField) -> i32 {
    let minus_eps = -field.eps_plus.clone();
    let gens = [FQMElem::new(1, 0, h.disc), FQMElem::new(0, 1, h.disc)];
    let degenerate = gens.iter().all(|x| x.mul_elem(&minus_eps) == *x);
    let count = if degenerate { 2 } else { 4 };
    let units = [
        (FieldElem::one(field.delta()), 1),
        (-FieldElem::one(field.delta()), -1),
        (field.eps_plus.clone(), 1),
        (-field.eps_plus.clone(), -1),
    ];
    units[..count]
        .iter()
        .filter(|(u, _)| h.mul_elem(u) == *h)
        .map(|(_, s)| s)
        .sum()
}

/// The genus character attached to Δ = Δ1·Δ2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusChar {
    pub delta1: i64,
    pub delta2: i64,
}

impl GenusChar {
    pub fn new(delta1: i64, delta2: i64) -> Result<Self> {
        let ok = |d: i64| d == 1 || arith::is_fundamental(d);
        if !ok(delta1) || !ok(delta2) || gcd(delta1, delta2) != 1 || delta1 * delta2 <= 1 {
            return invalid(format!(
                "({delta1}, {delta2}) is not a coprime fundamental factorization"
            ));
        }
        Ok(GenusChar { delta1, delta2 })
    }

    pub fn disc(&self) -> i64 {
        self.delta1 * self.delta2
    }

    pub fn is_odd(&self) -> bool {
        self.delta1 < 0
    }

    /// χ on an ideal class with norm A coprime to Δ.
    pub fn on_coprime_norm(&self, a: i64) -> i32 {
        kronecker(self.delta1, a)
    }

    /// All genus characters of Q(√Δ), each unordered pair once.
    pub fn all(disc: i64) -> Vec<GenusChar> {
        let parts = arith::prime_discriminants(disc);
        let k = parts.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << (k - 1)) {
            let d1: i64 = (0..k - 1)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| parts[i])
                .product();
            let (d1, d2) = (d1, disc / d1);
            let (d1, d2) = if d1.abs() <= d2.abs() {
                (d1, d2)
            } else {
                (d2, d1)
            };
            out.push(GenusChar {
                delta1: d1,
                delta2: d2,
            });
        }
        out
    }

    pub fn all_odd(disc: i64) -> Vec<GenusChar> {
        GenusChar::all(disc)
            .into_iter()
            .filter(|c| c.is_odd())
            .collect()
    }
}

/// Genus-theoretic data for one field: class group, d0 and cached character values.
#[derive(Debug)]
pub struct Genus {
    pub group: NarrowClassGroup,
    pub d0: GDeltaElem,
    ramified_chi: RwLock<HashMap<(GenusChar, i64), i32>>,
}

impl Genus {
    pub fn new(delta: i64) -> Result<Self> {
        let field = QuadField::new(delta)?;
        let group = NarrowClassGroup::new(&field)?;
        let d0 = d0(&field);
        Ok(Genus {
            group,
            d0,
            ramified_chi: RwLock::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &QuadField {
        &self.group.field
    }

    pub fn delta(&self) -> i64 {
        self.field().delta()
    }

    pub fn s_h(&self, h: &FQMElem) -> u32 {
        s_h(h, self.d0, self.field().disc.delta0)
    }

    /// χ on a narrow class given by its representative index.
    pub fn chi_on_rep(&self, chi: &GenusChar, k: usize) -> i32 {
        let a = self.group.reps[k].norm().to_integer().to_i64().unwrap();
        chi.on_coprime_norm(a)
    }

    /// χ(𝔡_p), via a representative of coprime norm in the same narrow class.
    pub fn chi_ramified(&self, chi: &GenusChar, p: i64) -> i32 {
        if let Some(&v) = self.ramified_chi.read().unwrap().get(&(*chi, p)) {
            return v;
        }
        let dp = self.field().ramified_prime(p).expect("p divides Δ");
        let v = self.chi_on_rep(chi, self.group.class_of(&dp));
        self.ramified_chi.write().unwrap().insert((*chi, p), v);
        v
    }

    /// χ on the narrow class of a nonzero fractional ideal.
    pub fn chi_on_class(&self, chi: &GenusChar, i: &FracIdeal) -> i32 {
        // Rational scalings are totally positive, so only the primitive part matters.
        let mut a = i.a.to_i64().expect("ideal norm too large");
        let mut val = 1;
        for p in arith::prime_divisors(self.delta()) {
            if a % p == 0 {
                a /= p;
                val *= self.chi_ramified(chi, p);
            }
        }
        val * chi.on_coprime_norm(a)
    }

    /// ρ_{K/F}(I) by the multiplicative formula.
    pub fn rho_kf(&self, chi: &GenusChar, i: &FracIdeal) -> u64 {
        let mut r = 1u64;
        for (q, e) in factor_ideal(self.field(), i) {
            let local = if self.chi_on_class(chi, &q) == 1 {
                u64::from(e) + 1
            } else {
                u64::from(e % 2 == 0)
            };
            r *= local;
            if r == 0 {
                break;
            }
        }
        r
    }

    /// Σ_{𝔟 ⊇ I} χ(𝔟) by enumerating divisors.
    pub fn rho_kf_divisor_sum(&self, chi: &GenusChar, i: &FracIdeal) -> i64 {
        divisors(self.field(), i)
            .iter()
            .map(|b| i64::from(self.chi_on_class(chi, b)))
            .sum()
    }

    /// For each class representative 𝔟 with 𝔞𝔟′/𝔟 narrowly principal, the
    /// classes of μ/√Δ and ε_F^+μ/√Δ for a totally positive generator μ.
    pub fn sqrt_table(&self, a: &FracIdeal) -> SqrtTable {
        let field = self.field();
        let mut entries = Vec::new();
        for (k, b) in self.group.reps.iter().enumerate() {
            let j = a.mul(&b.conj()).div(b);
            if let Some(mu) = field.is_principal_tp(&j) {
                let h1 = FQMElem::from_numerator(&mu);
                let h2 = FQMElem::from_numerator(&(&mu * &field.eps_plus));
                entries.push((k, [h1, h2]));
            }
        }
        SqrtTable { entries }
    }

    /// Narrow classes [𝔟] with 𝔞 = (𝔟/𝔟′)(μ), μ ≫ 0, μ/√Δ ∈ h.
    pub fn sqrt_support(&self, a: &FracIdeal, h: &FQMElem) -> Vec<usize> {
        self.sqrt_table(a).support(h)
    }

    /// χ summed over a multiset of classes.
    pub fn chi_sum(&self, chi: &GenusChar, classes: &[usize]) -> i64 {
        classes
            .iter()
            .map(|&k| i64::from(self.chi_on_rep(chi, k)))
            .sum()
    }
}

/// Precomputed data for sqrt(𝔞, ·) at a fixed ideal 𝔞.
#[derive(Clone, Debug)]
pub struct SqrtTable {
    entries: Vec<(usize, [Option<FQMElem>; 2])>,
}

impl SqrtTable {
    pub fn support(&self, h: &FQMElem) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|(_, hs)| hs.iter().any(|x| x.as_ref() == Some(h)))
            .map(|(k, _)| *k)
            .collect()
    }
}

/// χ(𝔡_p) = (Δ_other/p), with Δ_other the factor prime to p.
pub fn chi_ramified_direct(chi: &GenusChar, p: i64) -> i32 {
    let other = if chi.delta1 % p == 0 {
        chi.delta2
    } else {
        chi.delta1
    };
    kronecker(other, p)
}

/// All integral ideals containing I.
pub fn divisors(field: &QuadField, i: &FracIdeal) -> Vec<FracIdeal> {
    let mut acc = vec![field.unit_ideal()];
    for (q, e) in factor_ideal(field, i) {
        let powers: Vec<FracIdeal> = (0..=e).map(|j| q.pow(i64::from(j))).collect();
        acc = acc
            .iter()
            .flat_map(|a| powers.iter().map(move |p| a.mul(p)))
            .collect();
    }
    acc
}
