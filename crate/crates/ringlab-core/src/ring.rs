//! Realized finite rings: total arithmetic over a canonical element index
//! space `0..order`.
//!
//! Every construction is index-coded with a mixed radix: an element of a
//! composite ring is a vector of inner-ring indices, packed little-endian
//! (component 0 is the least significant digit). Arithmetic decodes, operates
//! componentwise, and re-encodes; rings of order <= 256 additionally carry
//! full operation tables so inner rings stay cheap inside hot matrix loops.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::Caches;
use crate::descriptor::{is_prime_power, RingDescriptor};
use crate::error::RingError;

/// Largest ring that gets full add/mul/neg lookup tables.
pub(crate) const TABLE_MAX: u64 = 256;

/// Component buffers are fixed arrays; any representable order fits because
/// base >= 2 and base^components <= u64::MAX forces components <= 63.
pub(crate) const MAX_COMPONENTS: usize = 64;

pub(crate) enum Repr {
    ZMod {
        n: u64,
        /// Product of the distinct primes dividing n.
        rad: u64,
    },
    Galois {
        q: u64,
        p: u64,
        add: Vec<u8>,
        mul: Vec<u8>,
        neg: Vec<u8>,
        inv: Vec<u8>, // inv[0] unused
    },
    Matrix {
        k: usize,
        inner: Arc<Ring>,
    },
    Triangular {
        k: usize,
        inner: Arc<Ring>,
        /// Row-major upper-triangle coordinates; component i sits at pos[i].
        pos: Vec<(usize, usize)>,
        /// (row, col) -> component index for row <= col.
        at: Vec<Vec<Option<usize>>>,
    },
    Product {
        factors: Vec<Arc<Ring>>,
    },
    Truncated {
        inner: Arc<Ring>,
        n: usize,
    },
    TrivialExt {
        inner: Arc<Ring>,
        m: usize,
    },
    MoritaZero {
        inner: Arc<Ring>,
        m: usize,
        n: usize,
    },
    Corner {
        parent: Arc<Ring>,
        e: u64,
        elems: Vec<u64>,
        pos: HashMap<u64, u64>,
    },
    Quotient {
        parent: Arc<Ring>,
        ideal: Vec<u64>,
        reps: Vec<u64>,
        /// parent index -> quotient index
        coset: Vec<u64>,
    },
}

struct OpTables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

/// A realized finite ring with identity.
pub struct Ring {
    name: String,
    descriptor: Option<RingDescriptor>,
    order: u64,
    one: u64,
    commutative: bool,
    characteristic: u64,
    pub(crate) repr: Repr,
    tables: Option<OpTables>,
    pub(crate) caches: Caches,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({}, order {})", self.name, self.order)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub(crate) fn ceil_log2(n: u64) -> u32 {
    64 - n.saturating_sub(1).leading_zeros()
}

fn squarefree_radical(mut n: u64) -> u64 {
    let mut rad = 1;
    let mut d = 2;
    while d as u128 * d as u128 <= n as u128 {
        if n % d == 0 {
            rad *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        rad *= n;
    }
    rad
}

/// Fixed irreducible moduli for the supported non-prime field sizes.
/// Coefficients c0..ck of the monic modulus.
fn galois_modulus(q: u64) -> Option<(u64, Vec<u64>)> {
    match q {
        4 => Some((2, vec![1, 1, 1])),    // x^2 + x + 1
        8 => Some((2, vec![1, 1, 0, 1])), // x^3 + x + 1
        9 => Some((3, vec![1, 0, 1])),    // x^2 + 1
        _ => None,
    }
}

fn build_galois(q: u64) -> Result<Repr, RingError> {
    let (p, k) = is_prime_power(q).ok_or(RingError::UnsupportedField { q })?;
    if k == 1 {
        return Ok(Repr::ZMod { n: q, rad: q });
    }
    let (_, modulus) = galois_modulus(q).ok_or(RingError::UnsupportedField { q })?;
    let deg = modulus.len() - 1;
    let digits = |mut v: u64| -> Vec<u64> {
        let mut out = vec![0; deg];
        for d in out.iter_mut() {
            *d = v % p;
            v /= p;
        }
        out
    };
    let pack = |cs: &[u64]| -> u64 {
        let mut v = 0;
        for (i, &c) in cs.iter().enumerate().take(deg) {
            v += (c % p) * p.pow(i as u32);
        }
        v
    };
    let poly_mul_mod = |a: u64, b: u64| -> u64 {
        let (da, db) = (digits(a), digits(b));
        let mut prod = vec![0u64; 2 * deg];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // reduce by the monic modulus
        for i in (deg..2 * deg).rev() {
            let c = prod[i];
            if c != 0 {
                prod[i] = 0;
                for (j, &mc) in modulus.iter().enumerate().take(deg) {
                    let idx = i - deg + j;
                    prod[idx] = (prod[idx] + c * (p - mc % p)) % p;
                }
            }
        }
        pack(&prod)
    };
    let mut add = vec![0u8; (q * q) as usize];
    let mut mul = vec![0u8; (q * q) as usize];
    let mut neg = vec![0u8; q as usize];
    let mut inv = vec![0u8; q as usize];
    for a in 0..q {
        let da = digits(a);
        let dn: Vec<u64> = da.iter().map(|&c| (p - c) % p).collect();
        neg[a as usize] = pack(&dn) as u8;
        for b in 0..q {
            let db = digits(b);
            let ds: Vec<u64> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
            add[(a * q + b) as usize] = pack(&ds) as u8;
            mul[(a * q + b) as usize] = poly_mul_mod(a, b) as u8;
        }
    }
    for a in 1..q {
        for b in 1..q {
            if mul[(a * q + b) as usize] == 1 {
                inv[a as usize] = b as u8;
                break;
            }
        }
        if inv[a as usize] == 0 {
            return Err(RingError::internal(format!("GF({q}): no inverse for element {a}")));
        }
    }
    Ok(Repr::Galois { q, p, add, mul, neg, inv })
}

impl Ring {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn descriptor(&self) -> Option<&RingDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        self.one
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.order
    }

    pub fn check_index(&self, i: u64) -> Result<(), RingError> {
        if i < self.order {
            Ok(())
        } else {
            Err(RingError::IndexOutOfRange { index: i, order: self.order })
        }
    }

    pub fn add(&self, i: u64, j: u64) -> u64 {
        if let Some(t) = &self.tables {
            return t.add[(i * self.order + j) as usize] as u64;
        }
        self.add_raw(i, j)
    }

    pub fn mul(&self, i: u64, j: u64) -> u64 {
        if let Some(t) = &self.tables {
            return t.mul[(i * self.order + j) as usize] as u64;
        }
        self.mul_raw(i, j)
    }

    pub fn neg(&self, i: u64) -> u64 {
        if let Some(t) = &self.tables {
            return t.neg[i as usize] as u64;
        }
        self.neg_raw(i)
    }

    pub fn sub(&self, i: u64, j: u64) -> u64 {
        self.add(i, self.neg(j))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if e == 0 {
            return self.one;
        }
        let mut base = a;
        let mut acc: Option<u64> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(x) => self.mul(x, base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc.unwrap()
    }

    fn add_raw(&self, i: u64, j: u64) -> u64 {
        match &self.repr {
            Repr::ZMod { n, .. } => {
                let s = i + j;
                if s >= *n {
                    s - n
                } else {
                    s
                }
            }
            Repr::Galois { q, add, .. } => add[(i * q + j) as usize] as u64,
            Repr::Matrix { k, inner } => digitwise(inner, k * k, i, j, |x, y| inner.add(x, y)),
            Repr::Triangular { pos, inner, .. } => {
                digitwise(inner, pos.len(), i, j, |x, y| inner.add(x, y))
            }
            Repr::Truncated { inner, n } => digitwise(inner, *n, i, j, |x, y| inner.add(x, y)),
            Repr::TrivialExt { inner, m } => digitwise(inner, 1 + m, i, j, |x, y| inner.add(x, y)),
            Repr::MoritaZero { inner, m, n } => {
                digitwise(inner, 2 + m + n, i, j, |x, y| inner.add(x, y))
            }
            Repr::Product { factors } => {
                let mut out = 0;
                let mut mult = 1u64;
                let (mut x, mut y) = (i, j);
                for (idx, f) in factors.iter().enumerate() {
                    let b = f.order();
                    out += f.add(x % b, y % b) * mult;
                    x /= b;
                    y /= b;
                    if idx + 1 < factors.len() {
                        mult *= b;
                    }
                }
                out
            }
            Repr::Corner { parent, elems, pos, .. } => {
                pos[&parent.add(elems[i as usize], elems[j as usize])]
            }
            Repr::Quotient { parent, reps, coset, .. } => {
                coset[parent.add(reps[i as usize], reps[j as usize]) as usize]
            }
        }
    }

    fn neg_raw(&self, i: u64) -> u64 {
        match &self.repr {
            Repr::ZMod { n, .. } => {
                if i == 0 {
                    0
                } else {
                    n - i
                }
            }
            Repr::Galois { neg, .. } => neg[i as usize] as u64,
            Repr::Matrix { k, inner } => digitmap(inner, k * k, i, |x| inner.neg(x)),
            Repr::Triangular { pos, inner, .. } => digitmap(inner, pos.len(), i, |x| inner.neg(x)),
            Repr::Truncated { inner, n } => digitmap(inner, *n, i, |x| inner.neg(x)),
            Repr::TrivialExt { inner, m } => digitmap(inner, 1 + m, i, |x| inner.neg(x)),
            Repr::MoritaZero { inner, m, n } => digitmap(inner, 2 + m + n, i, |x| inner.neg(x)),
            Repr::Product { factors } => {
                let mut out = 0;
                let mut mult = 1u64;
                let mut x = i;
                for (idx, f) in factors.iter().enumerate() {
                    let b = f.order();
                    out += f.neg(x % b) * mult;
                    x /= b;
                    if idx + 1 < factors.len() {
                        mult *= b;
                    }
                }
                out
            }
            Repr::Corner { parent, elems, pos, .. } => pos[&parent.neg(elems[i as usize])],
            Repr::Quotient { parent, reps, coset, .. } => coset[parent.neg(reps[i as usize]) as usize],
        }
    }

    fn mul_raw(&self, i: u64, j: u64) -> u64 {
        match &self.repr {
            Repr::ZMod { n, .. } => ((i as u128 * j as u128) % *n as u128) as u64,
            Repr::Galois { q, mul, .. } => mul[(i * q + j) as usize] as u64,
            Repr::Matrix { k, inner } => {
                let k = *k;
                let b = inner.order();
                let mut av = [0u64; MAX_COMPONENTS];
                let mut bv = [0u64; MAX_COMPONENTS];
                decode(b, k * k, i, &mut av);
                decode(b, k * k, j, &mut bv);
                let mut out = [0u64; MAX_COMPONENTS];
                for r in 0..k {
                    for c in 0..k {
                        let mut s = 0;
                        for t in 0..k {
                            s = inner.add(s, inner.mul(av[r * k + t], bv[t * k + c]));
                        }
                        out[r * k + c] = s;
                    }
                }
                encode(b, k * k, &out)
            }
            Repr::Triangular { k, inner, pos, at } => {
                let b = inner.order();
                let c = pos.len();
                let mut av = [0u64; MAX_COMPONENTS];
                let mut bv = [0u64; MAX_COMPONENTS];
                decode(b, c, i, &mut av);
                decode(b, c, j, &mut bv);
                let mut out = [0u64; MAX_COMPONENTS];
                for (ci, &(r, col)) in pos.iter().enumerate() {
                    let mut s = 0;
                    for t in r..=col {
                        let x = av[at[r][t].unwrap()];
                        let y = bv[at[t][col].unwrap()];
                        s = inner.add(s, inner.mul(x, y));
                    }
                    out[ci] = s;
                }
                let _ = k;
                encode(b, c, &out)
            }
            Repr::Truncated { inner, n } => {
                let b = inner.order();
                let n = *n;
                let mut av = [0u64; MAX_COMPONENTS];
                let mut bv = [0u64; MAX_COMPONENTS];
                decode(b, n, i, &mut av);
                decode(b, n, j, &mut bv);
                let mut out = [0u64; MAX_COMPONENTS];
                for s in 0..n {
                    let mut acc = 0;
                    for t in 0..=s {
                        acc = inner.add(acc, inner.mul(av[t], bv[s - t]));
                    }
                    out[s] = acc;
                }
                encode(b, n, &out)
            }
            Repr::TrivialExt { inner, m } => {
                let b = inner.order();
                let c = 1 + m;
                let mut av = [0u64; MAX_COMPONENTS];
                let mut bv = [0u64; MAX_COMPONENTS];
                decode(b, c, i, &mut av);
                decode(b, c, j, &mut bv);
                let mut out = [0u64; MAX_COMPONENTS];
                out[0] = inner.mul(av[0], bv[0]);
                for t in 1..c {
                    out[t] = inner.add(inner.mul(av[0], bv[t]), inner.mul(av[t], bv[0]));
                }
                encode(b, c, &out)
            }
            Repr::MoritaZero { inner, m, n } => {
                let b = inner.order();
                let (m, n) = (*m, *n);
                let c = 2 + m + n;
                let mut av = [0u64; MAX_COMPONENTS];
                let mut bv = [0u64; MAX_COMPONENTS];
                decode(b, c, i, &mut av);
                decode(b, c, j, &mut bv);
                // layout: [a, x_0..x_{m-1}, y_0..y_{n-1}, b]; both pairings are zero
                let mut out = [0u64; MAX_COMPONENTS];
                out[0] = inner.mul(av[0], bv[0]);
                for t in 0..m {
                    out[1 + t] = inner.add(
                        inner.mul(av[0], bv[1 + t]),
                        inner.mul(av[1 + t], bv[1 + m + n]),
                    );
                }
                for t in 0..n {
                    out[1 + m + t] = inner.add(
                        inner.mul(av[1 + m + t], bv[0]),
                        inner.mul(av[1 + m + n], bv[1 + m + t]),
                    );
                }
                out[1 + m + n] = inner.mul(av[1 + m + n], bv[1 + m + n]);
                encode(b, c, &out)
            }
            Repr::Product { factors } => {
                let mut out = 0;
                let mut mult = 1u64;
                let (mut x, mut y) = (i, j);
                for (idx, f) in factors.iter().enumerate() {
                    let b = f.order();
                    out += f.mul(x % b, y % b) * mult;
                    x /= b;
                    y /= b;
                    if idx + 1 < factors.len() {
                        mult *= b;
                    }
                }
                out
            }
            Repr::Corner { parent, elems, pos, .. } => {
                pos[&parent.mul(elems[i as usize], elems[j as usize])]
            }
            Repr::Quotient { parent, reps, coset, .. } => {
                coset[parent.mul(reps[i as usize], reps[j as usize]) as usize]
            }
        }
    }

    /// Deterministic ring-axiom verification: exhaustive over all triples when
    /// order <= 64, otherwise 1000 seeded pseudorandom triples.
    pub fn verify_axioms(&self) -> Result<(), RingError> {
        if self.order < 2 {
            return Err(RingError::precondition("order-1 (zero) rings are not supported"));
        }
        if self.one == 0 {
            return Err(RingError::internal(format!("{}: zero equals one", self.name)));
        }
        let triple = |a: u64, b: u64, c: u64| -> Result<(), RingError> {
            let bad = |law: &str| {
                Err(RingError::internal(format!(
                    "{}: {} fails at ({a},{b},{c})",
                    self.name, law
                )))
            };
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return bad("mul associativity");
            }
            if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                return bad("add associativity");
            }
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                return bad("left distributivity");
            }
            if self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)) {
                return bad("right distributivity");
            }
            Ok(())
        };
        let single = |a: u64| -> Result<(), RingError> {
            if self.add(a, 0) != a
                || self.add(a, self.neg(a)) != 0
                || self.mul(a, self.one) != a
                || self.mul(self.one, a) != a
            {
                return Err(RingError::internal(format!(
                    "{}: identity/negation fails at {a}",
                    self.name
                )));
            }
            Ok(())
        };
        if self.order <= 64 {
            for a in 0..self.order {
                single(a)?;
                for b in 0..self.order {
                    if self.add(a, b) != self.add(b, a) {
                        return Err(RingError::internal(format!(
                            "{}: add commutativity fails at ({a},{b})",
                            self.name
                        )));
                    }
                    for c in 0..self.order {
                        triple(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x52494E47 ^ self.order);
            for _ in 0..1000 {
                let a = rng.random_range(0..self.order);
                let b = rng.random_range(0..self.order);
                let c = rng.random_range(0..self.order);
                single(a)?;
                if self.add(a, b) != self.add(b, a) {
                    return Err(RingError::internal(format!(
                        "{}: add commutativity fails at ({a},{b})",
                        self.name
                    )));
                }
                triple(a, b, c)?;
            }
        }
        Ok(())
    }

    fn build_tables(&mut self) {
        if self.order > TABLE_MAX {
            return;
        }
        let n = self.order as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        let mut neg = vec![0u32; n];
        for i in 0..n as u64 {
            neg[i as usize] = self.neg_raw(i) as u32;
            for j in 0..n as u64 {
                add[(i * self.order + j) as usize] = self.add_raw(i, j) as u32;
                mul[(i * self.order + j) as usize] = self.mul_raw(i, j) as u32;
            }
        }
        self.tables = Some(OpTables { add, mul, neg });
    }

    /// Exhaustive commutativity scan; used where no structural rule applies.
    fn scan_commutative(&self) -> bool {
        for a in 0..self.order {
            for b in a + 1..self.order {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    fn additive_order_of_one(&self) -> u64 {
        let mut x = self.one;
        let mut k = 1;
        while x != 0 {
            x = self.add(x, self.one);
            k += 1;
        }
        k
    }

    pub(crate) fn from_parts(
        name: String,
        descriptor: Option<RingDescriptor>,
        order: u64,
        one: u64,
        commutative: bool,
        characteristic: u64,
        repr: Repr,
    ) -> Result<Arc<Ring>, RingError> {
        let mut ring = Ring {
            name,
            descriptor,
            order,
            one,
            commutative,
            characteristic,
            repr,
            tables: None,
            caches: Caches::default(),
        };
        ring.build_tables();
        ring.verify_axioms()?;
        Ok(Arc::new(ring))
    }
}

#[inline]
pub(crate) fn decode(base: u64, count: usize, idx: u64, out: &mut [u64]) {
    let mut x = idx;
    for d in out.iter_mut().take(count) {
        *d = x % base;
        x /= base;
    }
}

#[inline]
pub(crate) fn encode(base: u64, count: usize, digits: &[u64]) -> u64 {
    let mut out = 0;
    let mut mult = 1u64;
    for (i, &d) in digits.iter().enumerate().take(count) {
        out += d * mult;
        if i + 1 < count {
            mult *= base;
        }
    }
    out
}

#[inline]
fn digitwise(inner: &Ring, count: usize, i: u64, j: u64, op: impl Fn(u64, u64) -> u64) -> u64 {
    let b = inner.order();
    let mut out = 0;
    let mut mult = 1u64;
    let (mut x, mut y) = (i, j);
    for idx in 0..count {
        out += op(x % b, y % b) * mult;
        x /= b;
        y /= b;
        if idx + 1 < count {
            mult *= b;
        }
    }
    out
}

#[inline]
fn digitmap(inner: &Ring, count: usize, i: u64, op: impl Fn(u64) -> u64) -> u64 {
    let b = inner.order();
    let mut out = 0;
    let mut mult = 1u64;
    let mut x = i;
    for idx in 0..count {
        out += op(x % b) * mult;
        x /= b;
        if idx + 1 < count {
            mult *= b;
        }
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Realize a descriptor as a ring. Orders may exceed any enumeration budget;
/// arithmetic stays index-computed, so large rings remain usable for
/// streaming element checks. Only u64 overflow of the order is rejected.
pub fn build_ring(d: &RingDescriptor) -> Result<Arc<Ring>, RingError> {
    let order = d.order().ok_or(RingError::OrderOverflow)?;
    let name = d.render();
    match d {
        RingDescriptor::ZMod { n } => Ring::from_parts(
            name,
            Some(d.clone()),
            order,
            1,
            true,
            *n,
            Repr::ZMod { n: *n, rad: squarefree_radical(*n) },
        ),
        RingDescriptor::GaloisField { q } => {
            let repr = build_galois(*q)?;
            let p = match &repr {
                Repr::ZMod { n, .. } => *n,
                Repr::Galois { p, .. } => *p,
                _ => unreachable!(),
            };
            Ring::from_parts(name, Some(d.clone()), order, 1, true, p, repr)
        }
        RingDescriptor::Matrix { k, inner } => {
            let inner = build_ring(inner)?;
            let b = inner.order();
            let mut digits = [0u64; MAX_COMPONENTS];
            for diag in 0..*k {
                digits[diag * k + diag] = inner.one();
            }
            let one = encode(b, k * k, &digits);
            let commutative = *k == 1 && inner.is_commutative();
            let ch = inner.characteristic();
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::Matrix { k: *k, inner },
            )
        }
        RingDescriptor::Triangular { k, inner } => {
            let inner = build_ring(inner)?;
            let b = inner.order();
            let mut pos = Vec::new();
            let mut at = vec![vec![None; *k]; *k];
            for r in 0..*k {
                for c in r..*k {
                    at[r][c] = Some(pos.len());
                    pos.push((r, c));
                }
            }
            let mut digits = [0u64; MAX_COMPONENTS];
            for diag in 0..*k {
                digits[at[diag][diag].unwrap()] = inner.one();
            }
            let one = encode(b, pos.len(), &digits);
            let commutative = *k == 1 && inner.is_commutative();
            let ch = inner.characteristic();
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::Triangular { k: *k, inner, pos, at },
            )
        }
        RingDescriptor::Product { factors } => {
            let factors: Vec<Arc<Ring>> =
                factors.iter().map(build_ring).collect::<Result<_, _>>()?;
            let mut one = 0;
            let mut mult = 1u64;
            for (i, f) in factors.iter().enumerate() {
                one += f.one() * mult;
                if i + 1 < factors.len() {
                    mult *= f.order();
                }
            }
            let commutative = factors.iter().all(|f| f.is_commutative());
            let ch = factors.iter().fold(1, |acc, f| lcm(acc, f.characteristic()));
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::Product { factors },
            )
        }
        RingDescriptor::Truncated { inner, n } => {
            let inner = build_ring(inner)?;
            let one = inner.one();
            let commutative = inner.is_commutative();
            let ch = inner.characteristic();
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::Truncated { inner, n: *n },
            )
        }
        RingDescriptor::TrivialExt { inner, m } => {
            let inner = build_ring(inner)?;
            let one = inner.one();
            let commutative = inner.is_commutative();
            let ch = inner.characteristic();
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::TrivialExt { inner, m: *m },
            )
        }
        RingDescriptor::MoritaZero { inner, m, n } => {
            let inner = build_ring(inner)?;
            let b = inner.order();
            let c = 2 + m + n;
            let mut digits = [0u64; MAX_COMPONENTS];
            digits[0] = inner.one();
            digits[1 + m + n] = inner.one();
            let one = encode(b, c, &digits);
            let commutative = *m == 0 && *n == 0 && inner.is_commutative();
            let ch = inner.characteristic();
            Ring::from_parts(
                name,
                Some(d.clone()),
                order,
                one,
                commutative,
                ch,
                Repr::MoritaZero { inner, m: *m, n: *n },
            )
        }
    }
}

/// Parse and build in one step.
pub fn build_ring_expr(text: &str) -> Result<Arc<Ring>, RingError> {
    let d = crate::descriptor::parse_ring_expr(text)?;
    build_ring(&d)
}

/// The Peirce corner ring eRe for an idempotent e, with inclusion and
/// retraction maps to and from the parent.
pub struct CornerRing {
    pub ring: Arc<Ring>,
    parent: Arc<Ring>,
    e: u64,
}

impl CornerRing {
    pub fn idempotent(&self) -> u64 {
        self.e
    }

    pub fn parent(&self) -> &Arc<Ring> {
        &self.parent
    }

    /// Corner index -> parent index.
    pub fn include(&self, corner_idx: u64) -> u64 {
        match &self.ring.repr {
            Repr::Corner { elems, .. } => elems[corner_idx as usize],
            _ => unreachable!(),
        }
    }

    /// Parent index -> corner index of e*a*e.
    pub fn retract(&self, parent_idx: u64) -> u64 {
        let p = &self.parent;
        let eae = p.mul(p.mul(self.e, parent_idx), self.e);
        match &self.ring.repr {
            Repr::Corner { pos, .. } => pos[&eae],
            _ => unreachable!(),
        }
    }

    /// Corner index of a parent element already lying in eRe.
    pub fn position_of(&self, parent_idx: u64) -> Option<u64> {
        match &self.ring.repr {
            Repr::Corner { pos, .. } => pos.get(&parent_idx).copied(),
            _ => unreachable!(),
        }
    }
}

/// Build the corner ring eRe. Errors when e is not idempotent or e = 0
/// (the zero corner has no identity distinct from zero).
pub fn corner_ring(parent: &Arc<Ring>, e: u64) -> Result<CornerRing, RingError> {
    parent.check_index(e)?;
    if parent.mul(e, e) != e {
        return Err(RingError::NotIdempotent { index: e });
    }
    if e == 0 {
        return Err(RingError::precondition("corner at e = 0 is the zero ring"));
    }
    let mut elems: Vec<u64> = crate::exec::filter_indices(parent.order(), |a| {
        parent.mul(parent.mul(e, a), e) == a
    });
    elems.sort_unstable();
    let pos: HashMap<u64, u64> =
        elems.iter().enumerate().map(|(i, &x)| (x, i as u64)).collect();
    let one = pos[&e];
    let order = elems.len() as u64;
    let name = format!(
        "corner({}, e={})",
        parent.name(),
        crate::literal::print_literal(parent, e)
    );
    let repr = Repr::Corner { parent: parent.clone(), e, elems, pos };
    // additive order of e within the parent
    let mut ch = 1u64;
    let mut x = e;
    while x != 0 {
        x = parent.add(x, e);
        ch += 1;
        if x == e {
            // additive cycle without hitting zero cannot happen in a group
            return Err(RingError::internal("additive order scan failed".into()));
        }
    }
    let commutative = if parent.is_commutative() {
        true
    } else {
        // decided after construction via exhaustive scan
        false
    };
    let ring = Ring::from_parts(name, None, order, one, commutative, ch, repr)?;
    let ring = if !parent.is_commutative() {
        let actual = ring.scan_commutative();
        if actual != ring.commutative {
            // rebuild with the correct flag (cheap; corner rings are small)
            let Repr::Corner { parent: p2, e: e2, elems: el2, pos: pos2 } = &ring.repr else {
                unreachable!()
            };
            Ring::from_parts(
                ring.name.clone(),
                None,
                ring.order,
                ring.one,
                actual,
                ring.characteristic,
                Repr::Corner {
                    parent: p2.clone(),
                    e: *e2,
                    elems: el2.clone(),
                    pos: pos2.clone(),
                },
            )?
        } else {
            ring
        }
    } else {
        ring
    };
    Ok(CornerRing { ring, parent: parent.clone(), e })
}

/// The four Peirce components of a relative to an idempotent e:
/// (eae, eaf, fae, faf) with f = 1 - e.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeirceView {
    pub ee: u64,
    pub ef: u64,
    pub fe: u64,
    pub ff: u64,
}

pub fn generalized_matrix_view(ring: &Ring, e: u64, a: u64) -> Result<PeirceView, RingError> {
    ring.check_index(e)?;
    ring.check_index(a)?;
    if ring.mul(e, e) != e {
        return Err(RingError::NotIdempotent { index: e });
    }
    let f = ring.sub(ring.one(), e);
    let ea = ring.mul(e, a);
    let fa = ring.mul(f, a);
    Ok(PeirceView {
        ee: ring.mul(ea, e),
        ef: ring.mul(ea, f),
        fe: ring.mul(fa, e),
        ff: ring.mul(fa, f),
    })
}

/// Inverse of the Peirce split: the four components always sum back to a.
pub fn peirce_assemble_components(ring: &Ring, v: &PeirceView) -> u64 {
    ring.add(ring.add(v.ee, v.ef), ring.add(v.fe, v.ff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::parse_ring_expr;

    fn ring(s: &str) -> Arc<Ring> {
        build_ring_expr(s).unwrap()
    }

    #[test]
    fn orders_match_construction() {
        assert_eq!(ring("Z6").order(), 6);
        assert_eq!(ring("T2(Z2)").order(), 8);
        assert_eq!(ring("morita0(Z2,1,1)").order(), 16);
        assert_eq!(ring("M2(Z4)").order(), 256);
        assert_eq!(ring("trunc(Z3,2)").order(), 9);
        assert_eq!(ring("trivext(Z3,2)").order(), 27);
        assert_eq!(ring("Z2 x Z3").order(), 6);
    }

    #[test]
    fn zmod_arithmetic() {
        let r = ring("Z6");
        assert_eq!(r.add(4, 5), 3);
        assert_eq!(r.mul(4, 5), 2);
        assert_eq!(r.neg(2), 4);
        assert_eq!(r.characteristic(), 6);
    }

    #[test]
    fn galois_fields_are_fields() {
        for q in [4u64, 8, 9] {
            let r = ring(&format!("GF({q})"));
            assert_eq!(r.order(), q);
            for a in 1..q {
                let mut found = false;
                for b in 1..q {
                    if r.mul(a, b) == r.one() {
                        found = true;
                        assert_eq!(r.mul(b, a), r.one());
                    }
                }
                assert!(found, "GF({q}): {a} has no inverse");
            }
        }
        // GF(p) behaves as the prime field
        let r = ring("GF(5)");
        assert_eq!(r.mul(2, 3), 1);
    }

    #[test]
    fn unsupported_field_size_rejected_at_build() {
        let d = parse_ring_expr("GF(16)").unwrap();
        assert!(matches!(build_ring(&d), Err(RingError::UnsupportedField { q: 16 })));
        assert!(build_ring(&parse_ring_expr("GF(25)").unwrap()).is_err());
    }

    #[test]
    fn matrix_multiplication() {
        let r = ring("M2(Z2)");
        // E12 * E21 = E11; layout (a00,a01,a10,a11) little-endian
        let e12 = encode(2, 4, &[0, 1, 0, 0]);
        let e21 = encode(2, 4, &[0, 0, 1, 0]);
        let e11 = encode(2, 4, &[1, 0, 0, 0]);
        assert_eq!(r.mul(e12, e21), e11);
        assert_eq!(r.mul(e21, e12), encode(2, 4, &[0, 0, 0, 1]));
        assert_eq!(r.one(), encode(2, 4, &[1, 0, 0, 1]));
        assert!(!r.is_commutative());
    }

    #[test]
    fn truncated_nilpotent_generator() {
        let r = ring("trunc(Z2,3)");
        let x = encode(2, 3, &[0, 1, 0]);
        let x2 = r.mul(x, x);
        assert_eq!(x2, encode(2, 3, &[0, 0, 1]));
        assert_eq!(r.mul(x2, x), 0);
    }

    #[test]
    fn trivial_extension_square_zero_module() {
        let r = ring("trivext(Z3,2)");
        let v = encode(3, 3, &[0, 1, 2]);
        assert_eq!(r.mul(v, v), 0);
        let u = encode(3, 3, &[2, 1, 0]);
        // (2,(1,0)) * (2,(1,0)) = (4, 2*(1,0)+(1,0)*2) = (1,(4,0)) = (1,(1,0))
        assert_eq!(r.mul(u, u), encode(3, 3, &[1, 1, 0]));
    }

    #[test]
    fn morita_zero_pairings_kill_cross_terms() {
        let r = ring("morita0(Z2,1,1)");
        // (0,x,y,0)^2 = 0 because both pairings vanish
        let off = encode(2, 4, &[0, 1, 1, 0]);
        assert_eq!(r.mul(off, off), 0);
        let one = r.one();
        assert_eq!(r.mul(one, off), off);
        assert!(!r.is_commutative());
    }

    #[test]
    fn corner_of_z6_at_3() {
        let r = ring("Z6");
        assert_eq!(r.mul(3, 3), 3);
        let c = corner_ring(&r, 3).unwrap();
        assert_eq!(c.ring.order(), 2);
        assert_eq!(c.include(c.ring.one()), 3);
        assert_eq!(c.ring.characteristic(), 2);
    }

    #[test]
    fn corner_at_identity_is_whole_ring() {
        let r = ring("M2(Z2)");
        let c = corner_ring(&r, r.one()).unwrap();
        assert_eq!(c.ring.order(), r.order());
    }

    #[test]
    fn corner_rejects_non_idempotent_and_zero() {
        let r = ring("Z6");
        assert!(corner_ring(&r, 2).is_err());
        assert!(corner_ring(&r, 0).is_err());
    }

    #[test]
    fn peirce_view_examples() {
        let r = ring("M2(Z2)");
        let e11 = encode(2, 4, &[1, 0, 0, 0]);
        // a = [[1,1],[1,0]]
        let a = encode(2, 4, &[1, 1, 1, 0]);
        let v = generalized_matrix_view(&r, e11, a).unwrap();
        assert_eq!(v.ee, encode(2, 4, &[1, 0, 0, 0]));
        assert_eq!(v.ef, encode(2, 4, &[0, 1, 0, 0]));
        assert_eq!(v.fe, encode(2, 4, &[0, 0, 1, 0]));
        assert_eq!(v.ff, 0);
        assert_eq!(peirce_assemble_components(&r, &v), a);

        let one = r.one();
        let v1 = generalized_matrix_view(&r, e11, one).unwrap();
        assert_eq!((v1.ee, v1.ef, v1.fe), (e11, 0, 0));
        let ve = generalized_matrix_view(&r, e11, e11).unwrap();
        assert_eq!((ve.ee, ve.ef, ve.fe, ve.ff), (e11, 0, 0, 0));
    }

    #[test]
    fn large_ring_is_buildable_for_streaming() {
        // order 101^8 ~ 1.08e16: index arithmetic only, no enumeration
        let r = ring("M2(Z101) x M2(Z101)");
        assert_eq!(r.order(), 101u64.pow(8));
        assert_eq!(r.mul(r.one(), r.one()), r.one());
    }

    #[test]
    fn axioms_hold_on_small_rings() {
        for s in ["Z9", "GF(8)", "T2(Z3)", "trivext(Z2,2)", "morita0(Z2,1,0)"] {
            ring(s).verify_axioms().unwrap();
        }
    }
}
