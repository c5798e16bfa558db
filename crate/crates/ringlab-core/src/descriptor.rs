//! Ring expression AST and its parser.
//!
//! Grammar (ASCII):
//!
//! ```text
//! ring := "Z" nat | "GF(" nat ")" | "M" nat "(" ring ")" | "T" nat "(" ring ")"
//!       | ring " x " ring | "prod(" ring {"," ring} ")"
//!       | "trunc(" ring "," nat ")" | "trivext(" ring ["," nat] ")"
//!       | "morita0(" ring "," nat "," nat ")"
//! ```

use std::fmt;

use crate::error::ParseError;

/// AST naming a finite-ring construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    /// Integers modulo n, n >= 2.
    ZMod { n: u64 },
    /// Galois field with q elements, q a prime power.
    GaloisField { q: u64 },
    /// k x k full matrices over the inner ring.
    Matrix { k: usize, inner: Box<RingDescriptor> },
    /// k x k upper triangular matrices over the inner ring.
    Triangular { k: usize, inner: Box<RingDescriptor> },
    /// Direct product of at least two rings.
    Product { factors: Vec<RingDescriptor> },
    /// R[x]/(x^n), n >= 2, as coefficient vectors of length n.
    Truncated { inner: Box<RingDescriptor>, n: usize },
    /// Trivial extension R ~ R^m: pairs (r, v) with (r,v)(r',v') = (rr', rv'+vr').
    TrivialExt { inner: Box<RingDescriptor>, m: usize },
    /// Morita context ring [[S, S^m],[S^n, S]] with both pairings zero.
    MoritaZero { inner: Box<RingDescriptor>, m: usize, n: usize },
}

impl RingDescriptor {
    /// Number of elements, or `None` on u64 overflow.
    pub fn order(&self) -> Option<u64> {
        fn pow_checked(base: u64, exp: u32) -> Option<u64> {
            let mut acc: u128 = 1;
            for _ in 0..exp {
                acc = acc.checked_mul(base as u128)?;
                if acc > u64::MAX as u128 {
                    return None;
                }
            }
            Some(acc as u64)
        }
        match self {
            RingDescriptor::ZMod { n } => Some(*n),
            RingDescriptor::GaloisField { q } => Some(*q),
            RingDescriptor::Matrix { k, inner } => {
                pow_checked(inner.order()?, (k * k) as u32)
            }
            RingDescriptor::Triangular { k, inner } => {
                pow_checked(inner.order()?, (k * (k + 1) / 2) as u32)
            }
            RingDescriptor::Product { factors } => {
                let mut acc: u128 = 1;
                for f in factors {
                    acc = acc.checked_mul(f.order()? as u128)?;
                    if acc > u64::MAX as u128 {
                        return None;
                    }
                }
                Some(acc as u64)
            }
            RingDescriptor::Truncated { inner, n } => pow_checked(inner.order()?, *n as u32),
            RingDescriptor::TrivialExt { inner, m } => {
                pow_checked(inner.order()?, (1 + m) as u32)
            }
            RingDescriptor::MoritaZero { inner, m, n } => {
                pow_checked(inner.order()?, (2 + m + n) as u32)
            }
        }
    }

    /// Canonical text form; `parse_ring_expr` round-trips it.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::ZMod { n } => write!(f, "Z{n}"),
            RingDescriptor::GaloisField { q } => write!(f, "GF({q})"),
            RingDescriptor::Matrix { k, inner } => write!(f, "M{k}({inner})"),
            RingDescriptor::Triangular { k, inner } => write!(f, "T{k}({inner})"),
            RingDescriptor::Product { factors } => {
                // " x " keeps the flat form unambiguous; nested products need prod(...).
                if factors.iter().any(|d| matches!(d, RingDescriptor::Product { .. })) {
                    write!(f, "prod(")?;
                    for (i, d) in factors.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{d}")?;
                    }
                    write!(f, ")")
                } else {
                    for (i, d) in factors.iter().enumerate() {
                        if i > 0 {
                            write!(f, " x ")?;
                        }
                        write!(f, "{d}")?;
                    }
                    Ok(())
                }
            }
            RingDescriptor::Truncated { inner, n } => write!(f, "trunc({inner},{n})"),
            RingDescriptor::TrivialExt { inner, m } => write!(f, "trivext({inner},{m})"),
            RingDescriptor::MoritaZero { inner, m, n } => write!(f, "morita0({inner},{m},{n})"),
        }
    }
}

/// True for q = p^k with p prime, k >= 1.
pub fn is_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((q, 1)); // prime
    }
    let mut k = 0u32;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    if n == 1 {
        Some((p, k))
    } else {
        None
    }
}

/// Parse a ring expression into its AST.
pub fn parse_ring_expr(text: &str) -> Result<RingDescriptor, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let d = p.ring()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(ParseError::new(p.pos, "unexpected trailing input"));
    }
    Ok(d)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected '{}'", b as char)))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.bytes[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let mut v: u64 = 0;
        let mut seen = false;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            seen = true;
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| ParseError::new(start, "number too large"))?;
            self.pos += 1;
        }
        if !seen {
            return Err(ParseError::new(self.pos, "expected a number"));
        }
        Ok(v)
    }

    /// ring := atom (" x " atom)*  — " x " products are flattened.
    fn ring(&mut self) -> Result<RingDescriptor, ParseError> {
        let first = self.atom()?;
        let mut factors = vec![first];
        loop {
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some(b'x') && self.pos > save {
                self.pos += 1;
                let after = self.peek();
                if after.is_some_and(|b| b.is_ascii_whitespace()) {
                    self.skip_ws();
                    factors.push(self.atom()?);
                    continue;
                }
            }
            self.pos = save;
            break;
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(RingDescriptor::Product { factors })
        }
    }

    fn inner_ring(&mut self) -> Result<Box<RingDescriptor>, ParseError> {
        self.skip_ws();
        let d = self.ring()?;
        self.skip_ws();
        Ok(Box::new(d))
    }

    fn atom(&mut self) -> Result<RingDescriptor, ParseError> {
        let at = self.pos;
        if self.eat_str("GF(") {
            self.skip_ws();
            let npos = self.pos;
            let q = self.nat()?;
            if is_prime_power(q).is_none() {
                return Err(ParseError::new(npos, format!("GF size must be a prime power, got {q}")));
            }
            self.skip_ws();
            self.eat(b')')?;
            return Ok(RingDescriptor::GaloisField { q });
        }
        if self.eat_str("prod(") {
            let mut factors = vec![*self.inner_ring()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                factors.push(*self.inner_ring()?);
            }
            self.eat(b')')?;
            if factors.len() < 2 {
                return Err(ParseError::new(at, "prod(...) needs at least two factors"));
            }
            return Ok(RingDescriptor::Product { factors });
        }
        if self.eat_str("trunc(") {
            let inner = self.inner_ring()?;
            self.eat(b',')?;
            self.skip_ws();
            let npos = self.pos;
            let n = self.nat()? as usize;
            if n < 2 {
                return Err(ParseError::new(npos, "truncation degree must be >= 2"));
            }
            self.skip_ws();
            self.eat(b')')?;
            return Ok(RingDescriptor::Truncated { inner, n });
        }
        if self.eat_str("trivext(") {
            let inner = self.inner_ring()?;
            let m = if self.peek() == Some(b',') {
                self.pos += 1;
                self.skip_ws();
                let npos = self.pos;
                let m = self.nat()? as usize;
                if m < 1 {
                    return Err(ParseError::new(npos, "module rank must be >= 1"));
                }
                self.skip_ws();
                m
            } else {
                1
            };
            self.eat(b')')?;
            return Ok(RingDescriptor::TrivialExt { inner, m });
        }
        if self.eat_str("morita0(") {
            let inner = self.inner_ring()?;
            self.eat(b',')?;
            self.skip_ws();
            let m = self.nat()? as usize;
            self.skip_ws();
            self.eat(b',')?;
            self.skip_ws();
            let n = self.nat()? as usize;
            self.skip_ws();
            self.eat(b')')?;
            return Ok(RingDescriptor::MoritaZero { inner, m, n });
        }
        match self.peek() {
            Some(b'Z') => {
                self.pos += 1;
                let npos = self.pos;
                let n = self.nat()?;
                if n < 2 {
                    return Err(ParseError::new(npos, "modulus must be >= 2 (order-1 rings are rejected)"));
                }
                Ok(RingDescriptor::ZMod { n })
            }
            Some(b'M') | Some(b'T') => {
                let tri = self.peek() == Some(b'T');
                self.pos += 1;
                let npos = self.pos;
                let k = self.nat()? as usize;
                if k < 1 {
                    return Err(ParseError::new(npos, "matrix dimension must be >= 1"));
                }
                self.eat(b'(')?;
                let inner = self.inner_ring()?;
                self.eat(b')')?;
                if tri {
                    Ok(RingDescriptor::Triangular { k, inner })
                } else {
                    Ok(RingDescriptor::Matrix { k, inner })
                }
            }
            _ => Err(ParseError::new(at, "expected a ring expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> RingDescriptor {
        parse_ring_expr(s).unwrap()
    }

    #[test]
    fn grammar_productions() {
        assert_eq!(
            parse("M2(Z4)"),
            RingDescriptor::Matrix { k: 2, inner: Box::new(RingDescriptor::ZMod { n: 4 }) }
        );
        assert_eq!(
            parse("Z3 x Z3"),
            RingDescriptor::Product {
                factors: vec![RingDescriptor::ZMod { n: 3 }, RingDescriptor::ZMod { n: 3 }],
            }
        );
        assert_eq!(
            parse("morita0(Z2,1,1)"),
            RingDescriptor::MoritaZero {
                inner: Box::new(RingDescriptor::ZMod { n: 2 }),
                m: 1,
                n: 1,
            }
        );
        assert_eq!(
            parse("trivext(Z2)"),
            RingDescriptor::TrivialExt { inner: Box::new(RingDescriptor::ZMod { n: 2 }), m: 1 }
        );
        assert_eq!(parse("T3(GF(8))").order(), Some(8u64.pow(6)));
    }

    #[test]
    fn infix_product_flattens() {
        let d = parse("Z2 x Z3 x Z5");
        match d {
            RingDescriptor::Product { ref factors } => assert_eq!(factors.len(), 3),
            _ => panic!("expected product"),
        }
    }

    #[test]
    fn nested_product_round_trips() {
        let d = parse("prod(Z2 x Z2, Z3)");
        let text = d.render();
        assert_eq!(parse(&text), d);
        match &d {
            RingDescriptor::Product { factors } => {
                assert!(matches!(factors[0], RingDescriptor::Product { .. }));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(parse_ring_expr("Z1").is_err());
        assert!(parse_ring_expr("Z0").is_err());
        assert!(parse_ring_expr("M0(Z2)").is_err());
        assert!(parse_ring_expr("trunc(Z2,1)").is_err());
        assert!(parse_ring_expr("GF(6)").is_err());
        assert!(parse_ring_expr("GF(12)").is_err());
        assert!(parse_ring_expr("prod(Z2)").is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_ring_expr("Z").unwrap_err();
        assert_eq!(err.pos, 1);
        let err = parse_ring_expr("M2(Z4").unwrap_err();
        assert_eq!(err.pos, 6);
        let err = parse_ring_expr("Z4 extra").unwrap_err();
        assert!(err.pos >= 3);
    }

    #[test]
    fn canonical_render_round_trips() {
        for s in [
            "Z6",
            "GF(9)",
            "M2(Z101)",
            "T2(Z2)",
            "Z3 x Z3",
            "trunc(Z2,3)",
            "trivext(Z3,2)",
            "morita0(Z3,1,0)",
            "M2(Z2 x Z3)",
        ] {
            let d = parse(s);
            assert_eq!(parse(&d.render()), d, "round trip failed for {s}");
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(is_prime_power(2), Some((2, 1)));
        assert_eq!(is_prime_power(9), Some((3, 2)));
        assert_eq!(is_prime_power(8), Some((2, 3)));
        assert_eq!(is_prime_power(1), None);
        assert_eq!(is_prime_power(6), None);
        assert_eq!(is_prime_power(12), None);
        assert_eq!(is_prime_power(125), Some((5, 3)));
    }
}
