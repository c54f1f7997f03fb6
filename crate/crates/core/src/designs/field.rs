//! Arithmetic in GF(p), GF(2^u) and GF(p^k) for odd `p`.
//!
//! Binary fields use a fixed irreducible modulus per degree (the
//! lexicographically least one) and exp/log tables over a primitive
//! element found at construction time. Odd extension fields search for the
//! least monic modulus that yields a cyclic unit group and use the same
//! tables.

use crate::error::{Error, Result};

/// Irreducible moduli for GF(2^u), bit-encoded, indexed by `u - 1`.
pub const BINARY_MODULI: [u32; 6] = [
    0b11,      // x + 1
    0b111,     // x^2 + x + 1
    0b1011,    // x^3 + x + 1
    0b10011,   // x^4 + x + 1
    0b100101,  // x^5 + x^2 + 1
    0b1000011, // x^6 + x + 1
];

/// Largest prime order accepted.
pub const MAX_PRIME_ORDER: u32 = 1 << 16;

/// Largest order accepted for `GF(p^k)`, `p` odd, `k >= 2`.
pub const MAX_EXTENSION_ORDER: u32 = 4096;

/// Order of a supported finite field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldOrder {
    order: u32,
}

impl FieldOrder {
    /// Validates that `r` is a prime (up to 2^16), `2^u` with `1 <= u <= 6`,
    /// or an odd prime power up to 4096.
    pub fn new(r: u32) -> Result<Self> {
        if is_prime(r) {
            if r > MAX_PRIME_ORDER {
                return Err(Error::UnsupportedFieldOrder(r));
            }
            return Ok(FieldOrder { order: r });
        }
        if r.is_power_of_two() && r > 1 {
            return if r.trailing_zeros() as usize <= BINARY_MODULI.len() {
                Ok(FieldOrder { order: r })
            } else {
                Err(Error::UnsupportedFieldOrder(r))
            };
        }
        match prime_power_base(r) {
            Some(_) if r <= MAX_EXTENSION_ORDER => Ok(FieldOrder { order: r }),
            Some(_) => Err(Error::UnsupportedFieldOrder(r)),
            None => Err(Error::NotPrimePower(r)),
        }
    }

    pub fn order(self) -> u32 {
        self.order
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Prime,
    Binary {
        modulus: u32,
        exp: Vec<u32>,
        log: Vec<u32>,
    },
    /// Elements are base-`p` digit strings `sum c_i p^i`.
    Extension {
        p: u32,
        modulus: Vec<u32>,
        exp: Vec<u32>,
        log: Vec<u32>,
    },
}

/// A finite field with elements `0..order`. For GF(2^u) an element is the
/// bit-encoded polynomial, for GF(p^k) the base-`p` encoded polynomial, and
/// for GF(p) the residue.
#[derive(Clone, Debug)]
pub struct FiniteField {
    order: u32,
    kind: Kind,
}

impl FiniteField {
    pub fn new(field_order: FieldOrder) -> Self {
        let order = field_order.order;
        if is_prime(order) {
            return FiniteField {
                order,
                kind: Kind::Prime,
            };
        }
        if order.is_power_of_two() {
            let u = order.trailing_zeros();
            let modulus = BINARY_MODULI[u as usize - 1];
            let (exp, log) = binary_tables(order, modulus);
            return FiniteField {
                order,
                kind: Kind::Binary { modulus, exp, log },
            };
        }
        let p = prime_power_base(order).expect("validated by FieldOrder");
        let k = order.ilog(p);
        let (modulus, exp, log) = extension_tables(p, k);
        FiniteField {
            order,
            kind: Kind::Extension {
                p,
                modulus,
                exp,
                log,
            },
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.kind, Kind::Binary { .. })
    }

    /// Bit-encoded modulus for binary fields.
    pub fn modulus(&self) -> Option<u32> {
        match self.kind {
            Kind::Binary { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    /// Coefficients (constant term first, monic) of the modulus of an odd
    /// extension field.
    pub fn extension_modulus(&self) -> Option<&[u32]> {
        match &self.kind {
            Kind::Extension { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self.kind {
            Kind::Prime => (a + b) % self.order,
            Kind::Binary { .. } => a ^ b,
            Kind::Extension { p, .. } => digit_add(a, b, p),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self.kind {
            Kind::Prime => (self.order - a) % self.order,
            Kind::Binary { .. } => a,
            Kind::Extension { p, .. } => digit_neg(a, p),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            Kind::Prime => ((u64::from(a) * u64::from(b)) % u64::from(self.order)) as u32,
            Kind::Binary { exp, log, .. } | Kind::Extension { exp, log, .. } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    let n = self.order as usize - 1;
                    exp[(log[a as usize] as usize + log[b as usize] as usize) % n]
                }
            }
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.kind {
            Kind::Prime => pow_mod(
                u64::from(a),
                u64::from(self.order) - 2,
                u64::from(self.order),
            ) as u32,
            Kind::Binary { exp, log, .. } | Kind::Extension { exp, log, .. } => {
                let n = self.order as usize - 1;
                exp[(n - log[a as usize] as usize) % n]
            }
        })
    }
}

/// Carry-less product reduced modulo `modulus`.
fn gf2_mul_slow(mut a: u32, mut b: u32, modulus: u32, order: u32) -> u32 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & order != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn binary_tables(order: u32, modulus: u32) -> (Vec<u32>, Vec<u32>) {
    cyclic_tables(order, |a, b| gf2_mul_slow(a, b, modulus, order))
        .unwrap_or_else(|| unreachable!("modulus {modulus:#b} is not irreducible"))
}

fn digit_add(mut a: u32, mut b: u32, p: u32) -> u32 {
    let (mut out, mut place) = (0, 1);
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_neg(mut a: u32, p: u32) -> u32 {
    let (mut out, mut place) = (0, 1);
    while a > 0 {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

fn digits(mut a: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two encoded polynomials modulo the monic `modulus`
/// (`k + 1` coefficients, constant term first).
fn poly_mul_slow(a: u32, b: u32, modulus: &[u32], p: u32) -> u32 {
    let k = modulus.len() - 1;
    let (a, b) = (digits(a, p, k as u32), digits(b, p, k as u32));
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (k..2 * k).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let slot = &mut prod[top - k + i];
            *slot = (*slot + (p - c) * m) % p;
        }
    }
    undigits(&prod[..k], p)
}

/// Exp/log tables over a generator of the nonzero elements under `mul`.
/// Returns `None` if no element generates them, i.e. the ring is not a
/// field.
fn cyclic_tables(order: u32, mul: impl Fn(u32, u32) -> u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = order as usize - 1;
    if n == 1 {
        return Some((vec![1], vec![0, 0]));
    }
    for g in 2..order {
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0u32; order as usize];
        let mut x = 1u32;
        let mut full = true;
        for k in 0..n {
            if (k > 0 && x == 1) || x == 0 {
                full = false;
                break;
            }
            exp.push(x);
            log[x as usize] = k as u32;
            x = mul(x, g);
        }
        if full && x == 1 {
            return Some((exp, log));
        }
    }
    None
}

fn extension_tables(p: u32, k: u32) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let order = p.pow(k);
    // Least monic modulus in the base-p encoding of its lower coefficients.
    // A monic polynomial without a root in GF(p) is skipped early.
    for low in 0..order {
        let mut modulus = digits(low, p, k);
        modulus.push(1);
        let has_root =
            (0..p).any(|t| modulus.iter().rev().fold(0, |acc, &c| (acc * t + c) % p) == 0);
        if has_root {
            continue;
        }
        if let Some((exp, log)) = cyclic_tables(order, |a, b| poly_mul_slow(a, b, &modulus, p)) {
            return (modulus, exp, log);
        }
    }
    unreachable!("GF({p}^{k}) has an irreducible modulus")
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` if `n = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power_base(n: u32) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}
