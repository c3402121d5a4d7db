//! The Dirichlet character group modulo `q`.
//!
//! Characters are labelled by exponent vectors on a fixed CRT basis of
//! `(Z/qZ)^×`: the least primitive root for each odd prime power `p^k`,
//! `−1` for `4`, and the pair `(−1, 5)` for `2^k` with `k ≥ 3`. A character
//! with exponents `(e_i)` sends the `i`-th generator to `e(e_i / ord_i)`.

mod root;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;

pub use root::{cyclotomic_polynomial, CycloInt, RootOfUnity};

use crate::numtheory::{carmichael_lambda, euler_phi, factorize, gcd, lcm, moebius, pow_mod};
use crate::{Error, Result};

/// Largest modulus for which the full group is built.
pub const MAX_MODULUS: u64 = 1_000_000;

const NON_UNIT: u32 = u32::MAX;

#[derive(Debug)]
struct Component {
    p: u64,
    k: u32,
    modulus: u64,
    /// Generators as residues mod `modulus`.
    generators: Vec<u64>,
    orders: Vec<u64>,
    /// Mixed-radix packed exponent vector of each residue, `NON_UNIT` off units.
    index: Vec<u32>,
}

impl Component {
    fn new(p: u64, k: u32) -> Self {
        let modulus = p.pow(k);
        let mut index = vec![NON_UNIT; modulus as usize];
        let (generators, orders) = if p == 2 {
            match k {
                1 => {
                    index[1] = 0;
                    (vec![], vec![])
                }
                2 => {
                    index[1] = 0;
                    index[3] = 1;
                    (vec![3], vec![2])
                }
                _ => {
                    let ord5 = modulus / 4;
                    let mut five = 1u64;
                    for b in 0..ord5 {
                        index[five as usize] = b as u32;
                        index[(modulus - five) as usize] = (ord5 + b) as u32;
                        five = five * 5 % modulus;
                    }
                    (vec![modulus - 1, 5], vec![2, ord5])
                }
            }
        } else {
            let phi = (p - 1) * p.pow(k - 1);
            let g = least_primitive_root(p, k);
            let mut pw = 1u64;
            for i in 0..phi {
                index[pw as usize] = i as u32;
                pw = pw * g % modulus;
            }
            (vec![g], vec![phi])
        };
        Self {
            p,
            k,
            modulus,
            generators,
            orders,
            index,
        }
    }

    /// Exponents of the generators giving `r`, or `None` off units.
    fn discrete_log(&self, r: u64) -> Option<(u64, u64)> {
        let idx = self.index[(r % self.modulus) as usize];
        if idx == NON_UNIT {
            return None;
        }
        let idx = idx as u64;
        match self.orders.len() {
            0 => Some((0, 0)),
            1 => Some((idx, 0)),
            _ => Some((idx / self.orders[1], idx % self.orders[1])),
        }
    }

    /// Conductor of the component character with the given exponents.
    fn conductor(&self, exps: &[u64]) -> u64 {
        match (self.p, exps.len()) {
            (_, 0) => 1,
            (2, 1) => {
                if exps[0] == 0 {
                    1
                } else {
                    4
                }
            }
            (2, _) => {
                if exps[1] == 0 {
                    if exps[0] == 0 {
                        1
                    } else {
                        4
                    }
                } else {
                    1 << (self.k - exps[1].trailing_zeros())
                }
            }
            (p, _) => {
                let e = exps[0];
                if e == 0 {
                    return 1;
                }
                let mut v = 0;
                let mut t = e;
                while t.is_multiple_of(p) && v < self.k - 1 {
                    t /= p;
                    v += 1;
                }
                p.pow(self.k - v)
            }
        }
    }
}

fn least_primitive_root(p: u64, k: u32) -> u64 {
    let modulus = p.pow(k);
    let phi = (p - 1) * p.pow(k - 1);
    let f = factorize(phi);
    (2..modulus)
        .find(|&g| {
            gcd(g, p) == 1
                && f.primes()
                    .all(|r| pow_mod(g, phi / r, modulus) != 1)
        })
        .expect("odd prime powers are cyclic")
}

/// Shared tables for one modulus.
pub struct GroupStructure {
    q: u64,
    exponent: u64,
    components: Vec<Component>,
    /// Order of each cyclic factor, flattened across components.
    factor_orders: Vec<u64>,
    /// Generator of each cyclic factor lifted to a residue mod `q`
    /// (1 on the other components).
    factor_generators: Vec<u64>,
}

impl fmt::Debug for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupStructure")
            .field("q", &self.q)
            .field("factor_orders", &self.factor_orders)
            .field("factor_generators", &self.factor_generators)
            .finish()
    }
}

fn crt_lift(residue: u64, modulus: u64, q: u64) -> u64 {
    // n ≡ residue (mod modulus), n ≡ 1 (mod q / modulus)
    let other = q / modulus;
    if other == 1 {
        return residue % q;
    }
    let (mut t, step) = (residue % modulus, modulus);
    while t % other != 1 % other {
        t += step;
    }
    t % q
}

impl GroupStructure {
    fn new(q: u64) -> Self {
        let components: Vec<Component> = factorize(q)
            .factors
            .iter()
            .map(|&(p, k)| Component::new(p, k))
            .collect();
        let mut factor_orders = Vec::new();
        let mut factor_generators = Vec::new();
        for c in &components {
            for (g, o) in c.generators.iter().zip(&c.orders) {
                factor_orders.push(*o);
                factor_generators.push(crt_lift(*g, c.modulus, q));
            }
        }
        Self {
            q,
            exponent: carmichael_lambda(q),
            components,
            factor_orders,
            factor_generators,
        }
    }

    /// Discrete logs of `n` on each cyclic factor.
    fn logs(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.factor_orders.len());
        for c in &self.components {
            let (a, b) = c.discrete_log(n)?;
            match c.orders.len() {
                0 => {}
                1 => out.push(a),
                _ => {
                    out.push(a);
                    out.push(b);
                }
            }
        }
        Some(out)
    }
}

/// A Dirichlet character modulo `q`.
#[derive(Clone)]
pub struct DirichletCharacter {
    structure: Arc<GroupStructure>,
    exponents: Vec<u64>,
    order: u64,
    conductor: u64,
    parity: u8,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl std::hash::Hash for DirichletCharacter {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.modulus().hash(state);
        self.exponents.hash(state);
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({})", self.label())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl DirichletCharacter {
    fn from_exponents(structure: Arc<GroupStructure>, exponents: Vec<u64>) -> Self {
        let order = exponents
            .iter()
            .zip(&structure.factor_orders)
            .fold(1, |acc, (&e, &o)| lcm(acc, o / gcd(e, o)));
        let mut conductor = 1;
        let mut offset = 0;
        for c in &structure.components {
            let n = c.orders.len();
            conductor *= c.conductor(&exponents[offset..offset + n]);
            offset += n;
        }
        let mut chi = Self {
            structure,
            exponents,
            order,
            conductor,
            parity: 0,
        };
        let q = chi.modulus();
        chi.parity = match chi.value_exponent(q.saturating_sub(1).max(1)) {
            Some(0) | None => 0,
            Some(_) => 1,
        };
        chi
    }

    pub fn modulus(&self) -> u64 {
        self.structure.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `κ = 0` for even characters, `1` for odd ones.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// `δ₁(χ)`. No exceptional zero exists in the supported range, so this is
    /// always false; an off-line zero surfaces as [`Error::ExceptionalZero`].
    pub fn is_exceptional(&self) -> bool {
        false
    }

    /// Exponent of the group, the common denominator of all values.
    pub fn value_denominator(&self) -> u64 {
        self.structure.exponent
    }

    /// `χ(n) = e(k / λ(q))`, returning `k`, or `None` when `gcd(n, q) > 1`.
    pub fn value_exponent(&self, n: u64) -> Option<u64> {
        let s = &self.structure;
        if s.q == 1 {
            return Some(0);
        }
        let logs = s.logs(n % s.q)?;
        let lambda = s.exponent;
        let mut k = 0u64;
        for ((l, e), o) in logs.iter().zip(&self.exponents).zip(&s.factor_orders) {
            k = (k + (l * e % o) * (lambda / o)) % lambda;
        }
        Some(k)
    }

    pub fn value(&self, n: i64) -> Option<RootOfUnity> {
        let q = self.modulus() as i64;
        let r = n.rem_euclid(q) as u64;
        self.value_exponent(r)
            .map(|k| RootOfUnity::new(k as i64, self.value_denominator()))
    }

    pub fn value_complex(&self, n: i64) -> Complex64 {
        self.value(n)
            .map_or(Complex64::new(0.0, 0.0), |r| r.to_complex())
    }

    /// `χ(n)` for `0 ≤ n < q` as complex doubles.
    pub fn complex_table(&self) -> Vec<Complex64> {
        (0..self.modulus())
            .map(|n| self.value_complex(n as i64))
            .collect()
    }

    /// `χ(n)` for `0 ≤ n < q` as exponents over [`value_denominator`](Self::value_denominator).
    pub fn exponent_table(&self) -> Vec<Option<u64>> {
        (0..self.modulus()).map(|n| self.value_exponent(n)).collect()
    }

    pub fn label(&self) -> String {
        let e: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!("q={};e={}", self.modulus(), e.join(","))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        let exps = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.structure.factor_orders)
            .map(|((a, b), o)| (a + b) % o)
            .collect();
        Ok(Self::from_exponents(self.structure.clone(), exps))
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exponents
            .iter()
            .zip(&self.structure.factor_orders)
            .map(|(e, o)| (o - e) % o)
            .collect();
        Self::from_exponents(self.structure.clone(), exps)
    }

    /// The primitive character mod [`conductor`](Self::conductor) inducing `self`.
    pub fn induce_primitive(&self) -> Self {
        let qs = self.conductor;
        if qs == self.modulus() {
            return self.clone();
        }
        let target = Arc::new(GroupStructure::new(qs));
        let q = self.modulus();
        let lambda = self.value_denominator();
        let exps = target
            .factor_generators
            .iter()
            .zip(&target.factor_orders)
            .map(|(&g, &o)| {
                let mut n = g;
                while gcd(n, q) != 1 {
                    n += qs;
                }
                let k = self
                    .value_exponent(n)
                    .expect("lift of a unit mod q* coprime to q");
                debug_assert_eq!(k * o % lambda, 0);
                (k * o / lambda) % o
            })
            .collect();
        Self::from_exponents(target, exps)
    }

    /// Gauss sum `τ(χ) = Σ_a χ(a) e(a/q)` of a primitive character.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive(self.label()));
        }
        let q = self.modulus();
        Ok((1..=q)
            .map(|a| {
                self.value_complex(a as i64)
                    * Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / q as f64)
            })
            .sum())
    }
}

/// The full list of characters mod `q`, principal first, then in
/// lexicographic order of exponent vectors.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    q: u64,
    characters: Vec<DirichletCharacter>,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        build_group(q)
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn principal(&self) -> &DirichletCharacter {
        &self.characters[0]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DirichletCharacter> {
        self.characters.iter()
    }

    pub fn by_exponents(&self, exps: &[u64]) -> Option<&DirichletCharacter> {
        self.characters.iter().find(|c| c.exponents == exps)
    }

    pub fn by_label(&self, label: &str) -> Result<&DirichletCharacter> {
        let (q, exps) = parse_label(label)?;
        if q != self.q {
            return Err(Error::ModulusMismatch(q, self.q));
        }
        self.by_exponents(&exps)
            .ok_or_else(|| Error::BadLabel(label.to_string()))
    }

    /// Whether `χ(a) + χ(b) ≠ 0` for every character (exact).
    pub fn values_never_cancel(&self, a: i64, b: i64) -> bool {
        self.characters.iter().all(|chi| match (chi.value(a), chi.value(b)) {
            (Some(x), Some(y)) => x * y.conj() != RootOfUnity::new(1, 2),
            _ => true,
        })
    }
}

impl<'a> IntoIterator for &'a CharacterGroup {
    type Item = &'a DirichletCharacter;
    type IntoIter = std::slice::Iter<'a, DirichletCharacter>;
    fn into_iter(self) -> Self::IntoIter {
        self.characters.iter()
    }
}

/// Builds every character mod `q`.
pub fn build_group(q: u64) -> Result<CharacterGroup> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if q > MAX_MODULUS {
        return Err(Error::Capacity {
            what: "character modulus",
            value: q,
            limit: MAX_MODULUS,
        });
    }
    let structure = Arc::new(GroupStructure::new(q));
    let orders = structure.factor_orders.clone();
    let total: u64 = orders.iter().product();
    let mut characters = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; orders.len()];
    for _ in 0..total {
        characters.push(DirichletCharacter::from_exponents(
            structure.clone(),
            exps.clone(),
        ));
        for i in (0..exps.len()).rev() {
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
    Ok(CharacterGroup { q, characters })
}

/// Parses `"q=<q>;e=<v1,v2,...>"`.
pub fn parse_label(label: &str) -> Result<(u64, Vec<u64>)> {
    let bad = || Error::BadLabel(label.to_string());
    let (qpart, epart) = label.trim().split_once(';').ok_or_else(bad)?;
    let q: u64 = qpart
        .strip_prefix("q=")
        .ok_or_else(bad)?
        .parse()
        .map_err(|_| bad())?;
    let e = epart.strip_prefix("e=").ok_or_else(bad)?;
    let exps = if e.is_empty() {
        Vec::new()
    } else {
        e.split(',')
            .map(|v| v.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    Ok((q, exps))
}

/// Looks up a character by label, building its group.
pub fn character_from_label(label: &str) -> Result<DirichletCharacter> {
    let (q, exps) = parse_label(label)?;
    let group = build_group(q)?;
    group
        .by_exponents(&exps)
        .cloned()
        .ok_or_else(|| Error::BadLabel(label.to_string()))
}

/// `φ(q)/φ(q*) · ∏_{p | q, p ∤ q*c} (p−2)/(p−1)` multiplied by `μ(q*)`, as an integer.
fn char_sum_coefficient(q: u64, conductor: u64, c: u64) -> i64 {
    let mut r = Ratio::new(
        moebius(conductor) as i128 * euler_phi(q) as i128,
        euler_phi(conductor) as i128,
    );
    for p in factorize(q).primes() {
        if !conductor.is_multiple_of(p) && !c.is_multiple_of(p) {
            r *= Ratio::new(p as i128 - 2, p as i128 - 1);
        }
    }
    assert!(r.is_integer(), "character sum coefficient must be integral");
    r.to_integer() as i64
}

/// `Σ_{a ≤ q, (a(c−a), q) = 1} χ(a)` in closed form:
/// `μ(q*) χ*(c) φ(q)/φ(q*) ∏_{p | q, p ∤ q*c} (p−2)/(p−1)`.
pub fn char_sum_closed_form(chi: &DirichletCharacter, c: u64) -> CycloInt {
    let order = chi.order();
    let primitive = chi.induce_primitive();
    let coefficient = char_sum_coefficient(chi.modulus(), chi.conductor(), c);
    match primitive.value(c as i64) {
        Some(root) if coefficient != 0 => CycloInt::scaled_root(order, root, coefficient),
        _ => CycloInt::zero(order),
    }
}

/// The same sum by direct enumeration.
pub fn char_sum_brute(chi: &DirichletCharacter, c: u64) -> CycloInt {
    let q = chi.modulus();
    let order = chi.order();
    let mut acc = CycloInt::zero(order);
    for a in 1..=q {
        let diff = (c as i64 - a as i64).unsigned_abs();
        if gcd(a * diff, q) == 1 || q == 1 {
            if let Some(root) = chi.value(a as i64) {
                acc.add_root(root, 1);
            }
        }
    }
    acc
}

/// `#{a ≤ q : (a(c−a), q) = 1}` by enumeration.
pub fn admissible_count(q: u64, c: u64) -> u64 {
    (1..=q)
        .filter(|&a| q == 1 || gcd(a * (c as i64 - a as i64).unsigned_abs(), q) == 1)
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_characters(q: u64) -> Vec<Vec<Option<RootOfUnity>>> {
        // every homomorphism (Z/q)^× → μ_λ, found by checking all value
        // assignments on the group generated by tabulated units
        let units: Vec<u64> = (1..=q).filter(|&a| gcd(a, q) == 1).collect();
        let lambda = carmichael_lambda(q);
        let mut found = Vec::new();
        let n = units.len();
        let mut assignment = vec![0u64; n];
        loop {
            let ok = units.iter().enumerate().all(|(i, &a)| {
                units.iter().enumerate().all(|(j, &b)| {
                    let ab = a * b % q;
                    let k = units.iter().position(|&u| u == ab % q.max(1) || (q == 1)).unwrap();
                    (assignment[i] + assignment[j]) % lambda == assignment[k]
                })
            });
            if ok {
                let table = (0..q)
                    .map(|r| {
                        units
                            .iter()
                            .position(|&u| u % q.max(1) == r % q.max(1))
                            .map(|i| RootOfUnity::new(assignment[i] as i64, lambda))
                    })
                    .collect();
                found.push(table);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return found;
                }
                assignment[i] += 1;
                if assignment[i] < lambda {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn group_sizes_and_orders() {
        let g1 = build_group(1).unwrap();
        assert_eq!(g1.len(), 1);
        assert!(g1.principal().is_principal());

        let g5 = build_group(5).unwrap();
        let mut orders: Vec<u64> = g5.iter().map(|c| c.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 4, 4]);

        let g8 = build_group(8).unwrap();
        assert_eq!(g8.len(), 4);
        assert!(g8.iter().all(|c| c.order() <= 2));

        for q in 1..=60 {
            let g = build_group(q).unwrap();
            assert_eq!(g.len() as u64, euler_phi(q), "q = {q}");
            assert!(g.principal().is_principal());
            for c in g.iter() {
                assert_eq!(carmichael_lambda(q) % c.order(), 0);
            }
        }
        assert!(matches!(build_group(MAX_MODULUS + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn matches_brute_force_homomorphisms() {
        for q in [5u64, 8, 9, 12] {
            let brute = brute_characters(q);
            let group = build_group(q).unwrap();
            assert_eq!(brute.len(), group.len());
            for chi in group.iter() {
                let table: Vec<Option<RootOfUnity>> =
                    (0..q).map(|n| chi.value(n as i64)).collect();
                assert!(brute.contains(&table), "q = {q}, {chi}");
            }
        }
    }

    #[test]
    fn values_are_multiplicative_and_periodic() {
        for q in [7u64, 16, 20, 45] {
            for chi in build_group(q).unwrap().iter() {
                for m in 0..q as i64 {
                    for n in 0..q as i64 {
                        let lhs = chi.value(m * n);
                        let rhs = match (chi.value(m), chi.value(n)) {
                            (Some(a), Some(b)) => Some(a * b),
                            _ => None,
                        };
                        assert_eq!(lhs, rhs);
                        assert_eq!(chi.value(n), chi.value(n + q as i64));
                        assert_eq!(chi.value(n).is_none(), gcd(n as u64, q) > 1);
                    }
                }
            }
        }
    }

    #[test]
    fn specific_values() {
        let g3 = build_group(3).unwrap();
        assert_eq!(g3.principal().value(2), Some(RootOfUnity::ONE));
        for q in 2..30u64 {
            for chi in build_group(q).unwrap().iter() {
                assert_eq!(chi.value(q as i64), None);
            }
        }
        let g5 = build_group(5).unwrap();
        for chi in g5.iter().filter(|c| c.order() == 4) {
            let v = chi.value(2).unwrap();
            assert_eq!(v.pow(4), RootOfUnity::ONE);
            assert_eq!(v.pow(2), RootOfUnity::new(1, 2));
            assert_eq!(chi.value(4), Some(RootOfUnity::new(1, 2)));
            assert!(v == RootOfUnity::new(1, 4) || v == RootOfUnity::new(3, 4));
        }
        // generator convention: 2 is the least primitive root mod 5, e = 1
        assert_eq!(g5.by_exponents(&[1]).unwrap().value(2), Some(RootOfUnity::new(1, 4)));
    }

    fn brute_conductor(chi: &DirichletCharacter) -> u64 {
        let q = chi.modulus();
        (1..=q)
            .filter(|&d| q.is_multiple_of(d))
            .find(|&d| {
                (1..q).all(|n| {
                    gcd(n, q) != 1
                        || (n % d != 1 % d)
                        || chi.value(n as i64) == Some(RootOfUnity::ONE)
                })
            })
            .unwrap()
    }

    #[test]
    fn conductors_match_brute_force() {
        for q in 1..=100u64 {
            for chi in build_group(q).unwrap().iter() {
                assert_eq!(chi.conductor(), brute_conductor(chi), "{chi}");
                assert_eq!(chi.is_principal(), chi.conductor() == 1);
                assert_eq!(chi.parity() == 0, chi.value(-1) == Some(RootOfUnity::ONE));
            }
        }
        let g12 = build_group(12).unwrap();
        assert_eq!(g12.principal().conductor(), 1);
        let g4 = build_group(4).unwrap();
        assert_eq!(g4.characters()[1].conductor(), 4);
    }

    #[test]
    fn induction_agrees_on_units_and_is_idempotent() {
        for q in [12u64, 24, 36, 40, 63, 100] {
            for chi in build_group(q).unwrap().iter() {
                let star = chi.induce_primitive();
                assert_eq!(star.modulus(), chi.conductor());
                assert!(star.is_primitive());
                assert_eq!(star.order(), chi.order());
                for n in 1..q {
                    if gcd(n, q) == 1 {
                        assert_eq!(chi.value(n as i64), star.value(n as i64));
                    }
                }
                let again = star.induce_primitive();
                assert_eq!(again, star);
                assert_eq!(again.conductor(), chi.conductor());
            }
        }
        // the character mod 12 coming from mod 3
        let g12 = build_group(12).unwrap();
        let from3 = g12
            .iter()
            .find(|c| c.conductor() == 3)
            .expect("mod-3 character lifts to mod 12");
        assert_eq!(from3.induce_primitive().modulus(), 3);
    }

    #[test]
    fn gauss_sums() {
        let g1 = build_group(1).unwrap();
        assert!((g1.principal().gauss_sum().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let g4 = build_group(4).unwrap();
        let tau = g4.characters()[1].gauss_sum().unwrap();
        assert!((tau - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        for q in [5u64, 7, 8, 9, 11, 13, 16, 25, 27] {
            for chi in build_group(q).unwrap().iter().filter(|c| c.is_primitive()) {
                let t = chi.gauss_sum().unwrap();
                let rel = (t.norm() - (q as f64).sqrt()).abs() / (q as f64).sqrt();
                assert!(rel < 1e-10, "{chi}: {t}");
            }
        }
        assert!(build_group(12).unwrap().principal().gauss_sum().is_err());
    }

    #[test]
    fn orthogonality_exact_small_moduli() {
        for q in 1..=100u64 {
            let g = build_group(q).unwrap();
            let lambda = carmichael_lambda(q);
            for a in 1..=q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let mut s = CycloInt::zero(lambda);
                for chi in g.iter() {
                    s.add_exponent(chi.value_exponent(a).unwrap(), 1);
                }
                let expected = if a % q == 1 % q { euler_phi(q) as i64 } else { 0 };
                assert_eq!(s, CycloInt::scaled_root(lambda, RootOfUnity::ONE, expected));
            }
        }
    }

    #[test]
    fn orthogonality_numeric_to_500() {
        for q in (101..=500u64).step_by(7) {
            let g = build_group(q).unwrap();
            let tables: Vec<Vec<Complex64>> = g.iter().map(|c| c.complex_table()).collect();
            for a in 1..q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let s: Complex64 = tables.iter().map(|t| t[a as usize]).sum();
                let expected = if a == 1 { euler_phi(q) as f64 } else { 0.0 };
                assert!((s - expected).norm() < 1e-10, "q = {q}, a = {a}");
            }
        }
    }

    #[test]
    fn char_sum_examples() {
        let g3 = build_group(3).unwrap();
        let p3 = g3.principal();
        assert_eq!(char_sum_brute(p3, 2).to_complex().re.round(), 1.0);
        assert_eq!(char_sum_closed_form(p3, 2), char_sum_brute(p3, 2));
        assert_eq!(char_sum_brute(p3, 3).to_complex().re.round(), 2.0);
        assert_eq!(char_sum_closed_form(p3, 3), char_sum_brute(p3, 3));
        let g4 = build_group(4).unwrap();
        let nontrivial = &g4.characters()[1];
        assert!(char_sum_brute(nontrivial, 1).is_zero());
        assert!(char_sum_closed_form(nontrivial, 1).is_zero());
    }

    #[test]
    fn char_sum_closed_form_exhaustive_to_60() {
        for q in 1..=60u64 {
            for chi in build_group(q).unwrap().iter() {
                for c in 1..=q {
                    assert_eq!(
                        char_sum_closed_form(chi, c),
                        char_sum_brute(chi, c),
                        "{chi}, c = {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        let g = build_group(40).unwrap();
        for chi in g.iter() {
            let back = g.by_label(&chi.label()).unwrap();
            assert_eq!(back, chi);
            assert_eq!(&character_from_label(&chi.label()).unwrap(), chi);
        }
        assert_eq!(build_group(1).unwrap().principal().label(), "q=1;e=");
        assert!(parse_label("q=5;x=1").is_err());
        assert!(g.by_label("q=41;e=0").is_err());
    }

    #[test]
    fn conjugation_and_products() {
        let g = build_group(21).unwrap();
        for a in g.iter() {
            assert!(a.mul(&a.conj()).unwrap().is_principal());
            for b in g.iter() {
                let ab = a.mul(b).unwrap();
                for n in 1..21 {
                    let lhs = ab.value(n);
                    let rhs = a.value(n).zip(b.value(n)).map(|(x, y)| x * y);
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let other = build_group(5).unwrap();
        assert!(g.principal().mul(other.principal()).is_err());
    }

    #[test]
    fn cancellation_predicate() {
        // q = 4: the odd character takes −1 at 3, so χ(1) + χ(3) = 0
        let g4 = build_group(4).unwrap();
        assert!(!g4.values_never_cancel(1, 3));
        assert!(g4.values_never_cancel(1, 1));
    }
}
