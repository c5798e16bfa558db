//! Structured element literals: integers for Z_n and Galois fields, row lists
//! for matrix rings, tuples for products, trivial extensions and Morita
//! rings, coefficient lists for truncated rings. Printing and parsing are
//! mutually inverse on every element.

use crate::error::ParseError;
use crate::ring::{decode, encode, Repr, Ring, MAX_COMPONENTS};

pub fn print_literal(ring: &Ring, idx: u64) -> String {
    match &ring.repr {
        Repr::ZMod { .. } | Repr::Galois { .. } => idx.to_string(),
        Repr::Matrix { k, inner } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            decode(b, k * k, idx, &mut v);
            let rows: Vec<String> = (0..*k)
                .map(|r| {
                    let cells: Vec<String> =
                        (0..*k).map(|c| print_literal(inner, v[r * k + c])).collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            format!("[{}]", rows.join(","))
        }
        Repr::Triangular { k, inner, pos, at } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            decode(b, pos.len(), idx, &mut v);
            let rows: Vec<String> = (0..*k)
                .map(|r| {
                    let cells: Vec<String> = (0..*k)
                        .map(|c| match at[r].get(c).copied().flatten() {
                            Some(ci) if r <= c => print_literal(inner, v[ci]),
                            _ => print_literal(inner, 0),
                        })
                        .collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            format!("[{}]", rows.join(","))
        }
        Repr::Product { factors } => {
            let mut x = idx;
            let parts: Vec<String> = factors
                .iter()
                .map(|f| {
                    let b = f.order();
                    let s = print_literal(f, x % b);
                    x /= b;
                    s
                })
                .collect();
            format!("({})", parts.join(","))
        }
        Repr::Truncated { inner, n } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            decode(b, *n, idx, &mut v);
            let cs: Vec<String> = (0..*n).map(|i| print_literal(inner, v[i])).collect();
            format!("poly[{}]", cs.join(","))
        }
        Repr::TrivialExt { inner, m } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            decode(b, 1 + m, idx, &mut v);
            let vs: Vec<String> = (1..=*m).map(|i| print_literal(inner, v[i])).collect();
            format!("({},[{}])", print_literal(inner, v[0]), vs.join(","))
        }
        Repr::MoritaZero { inner, m, n } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            decode(b, 2 + m + n, idx, &mut v);
            let xs: Vec<String> = (0..*m).map(|i| print_literal(inner, v[1 + i])).collect();
            let ys: Vec<String> = (0..*n).map(|i| print_literal(inner, v[1 + m + i])).collect();
            format!(
                "({},[{}],[{}],{})",
                print_literal(inner, v[0]),
                xs.join(","),
                ys.join(","),
                print_literal(inner, v[1 + m + n])
            )
        }
        Repr::Corner { elems, .. } => {
            let parent = corner_parent(ring);
            print_literal(parent, elems[idx as usize])
        }
        Repr::Quotient { parent, reps, .. } => print_literal(parent, reps[idx as usize]),
    }
}

fn corner_parent(ring: &Ring) -> &Ring {
    match &ring.repr {
        Repr::Corner { parent, .. } => parent,
        _ => unreachable!(),
    }
}

/// Parse a structured element literal in the context of `ring`.
pub fn parse_literal(ring: &Ring, text: &str) -> Result<u64, ParseError> {
    let mut p = Cursor { bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let v = value(ring, &mut p)?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(ParseError::new(p.pos, "unexpected trailing input in element literal"));
    }
    Ok(v)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected '{}'", b as char)))
        }
    }

    fn eat_str(&mut self, s: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.bytes[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected '{s}'")))
        }
    }

    fn integer(&mut self) -> Result<i128, ParseError> {
        self.skip_ws();
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let mut v: i128 = 0;
        let mut seen = false;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            seen = true;
            v = v * 10 + (b - b'0') as i128;
            if v > u64::MAX as i128 {
                return Err(ParseError::new(start, "number too large"));
            }
            self.pos += 1;
        }
        if !seen {
            return Err(ParseError::new(self.pos, "expected a number"));
        }
        Ok(if neg { -v } else { v })
    }
}

fn value(ring: &Ring, p: &mut Cursor) -> Result<u64, ParseError> {
    match &ring.repr {
        Repr::ZMod { n, .. } => {
            let v = p.integer()?;
            let m = *n as i128;
            Ok((((v % m) + m) % m) as u64)
        }
        Repr::Galois { q, neg, .. } => {
            let at = p.pos;
            let v = p.integer()?;
            let mag = v.unsigned_abs() as u64;
            if mag >= *q {
                return Err(ParseError::new(
                    at,
                    format!("field literal must have magnitude < {q}"),
                ));
            }
            Ok(if v < 0 { neg[mag as usize] as u64 } else { mag })
        }
        Repr::Matrix { k, inner } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            p.eat(b'[')?;
            for r in 0..*k {
                if r > 0 {
                    p.eat(b',')?;
                }
                p.eat(b'[')?;
                for c in 0..*k {
                    if c > 0 {
                        p.eat(b',')?;
                    }
                    p.skip_ws();
                    v[r * k + c] = value(inner, p)?;
                }
                p.eat(b']')?;
            }
            p.eat(b']')?;
            Ok(encode(b, k * k, &v))
        }
        Repr::Triangular { k, inner, pos, at } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            p.eat(b'[')?;
            for r in 0..*k {
                if r > 0 {
                    p.eat(b',')?;
                }
                p.eat(b'[')?;
                for c in 0..*k {
                    if c > 0 {
                        p.eat(b',')?;
                    }
                    p.skip_ws();
                    let at_pos = p.pos;
                    let entry = value(inner, p)?;
                    match at[r].get(c).copied().flatten() {
                        Some(ci) if r <= c => v[ci] = entry,
                        _ => {
                            if entry != 0 {
                                return Err(ParseError::new(
                                    at_pos,
                                    "below-diagonal entry must be 0 in a triangular ring",
                                ));
                            }
                        }
                    }
                }
                p.eat(b']')?;
            }
            p.eat(b']')?;
            Ok(encode(b, pos.len(), &v))
        }
        Repr::Product { factors } => {
            p.eat(b'(')?;
            let mut out = 0;
            let mut mult = 1u64;
            for (i, f) in factors.iter().enumerate() {
                if i > 0 {
                    p.eat(b',')?;
                }
                p.skip_ws();
                out += value(f, p)? * mult;
                if i + 1 < factors.len() {
                    mult *= f.order();
                }
            }
            p.eat(b')')?;
            Ok(out)
        }
        Repr::Truncated { inner, n } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            p.eat_str("poly[")?;
            p.skip_ws();
            let mut count = 0usize;
            if p.peek() != Some(b']') {
                loop {
                    if count >= *n {
                        return Err(ParseError::new(
                            p.pos,
                            format!("too many coefficients (max {n})"),
                        ));
                    }
                    v[count] = value(inner, p)?;
                    count += 1;
                    p.skip_ws();
                    if p.peek() == Some(b',') {
                        p.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            p.eat(b']')?;
            Ok(encode(b, *n, &v))
        }
        Repr::TrivialExt { inner, m } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            p.eat(b'(')?;
            v[0] = value(inner, p)?;
            p.eat(b',')?;
            p.eat(b'[')?;
            for i in 0..*m {
                if i > 0 {
                    p.eat(b',')?;
                }
                v[1 + i] = value(inner, p)?;
            }
            p.eat(b']')?;
            p.eat(b')')?;
            Ok(encode(b, 1 + m, &v))
        }
        Repr::MoritaZero { inner, m, n } => {
            let b = inner.order();
            let mut v = [0u64; MAX_COMPONENTS];
            p.eat(b'(')?;
            v[0] = value(inner, p)?;
            p.eat(b',')?;
            p.eat(b'[')?;
            for i in 0..*m {
                if i > 0 {
                    p.eat(b',')?;
                }
                v[1 + i] = value(inner, p)?;
            }
            p.eat(b']')?;
            p.eat(b',')?;
            p.eat(b'[')?;
            for i in 0..*n {
                if i > 0 {
                    p.eat(b',')?;
                }
                v[1 + m + i] = value(inner, p)?;
            }
            p.eat(b']')?;
            p.eat(b',')?;
            v[1 + m + n] = value(inner, p)?;
            p.eat(b')')?;
            Ok(encode(b, 2 + m + n, &v))
        }
        Repr::Corner { parent, pos, .. } => {
            let at = p.pos;
            let parent_idx = value(parent, p)?;
            pos.get(&parent_idx)
                .copied()
                .ok_or_else(|| ParseError::new(at, "element does not lie in the corner ring"))
        }
        Repr::Quotient { parent, coset, .. } => {
            let parent_idx = value(parent, p)?;
            Ok(coset[parent_idx as usize])
        }
    }
}

/// JSON value for an element: a number where the literal is an integer
/// (Z_n, Galois fields), a string otherwise.
pub fn literal_json(ring: &Ring, idx: u64) -> serde_json::Value {
    match &ring.repr {
        Repr::ZMod { .. } | Repr::Galois { .. } => serde_json::Value::from(idx),
        _ => serde_json::Value::from(print_literal(ring, idx)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::build_ring_expr;

    #[test]
    fn round_trip_all_elements_of_small_rings() {
        for s in [
            "Z6",
            "GF(9)",
            "M2(Z2)",
            "T2(Z3)",
            "Z2 x Z3",
            "trunc(Z2,3)",
            "trivext(Z3,2)",
            "morita0(Z2,1,1)",
            "morita0(Z2,1,0)",
            "morita0(Z2,0,0)",
        ] {
            let r = build_ring_expr(s).unwrap();
            for i in r.elements() {
                let lit = print_literal(&r, i);
                let back = parse_literal(&r, &lit)
                    .unwrap_or_else(|e| panic!("{s}: {lit}: {e}"));
                assert_eq!(back, i, "{s}: literal {lit}");
            }
        }
    }

    #[test]
    fn negative_integers_reduce() {
        let r = build_ring_expr("Z101").unwrap();
        assert_eq!(parse_literal(&r, "-7").unwrap(), 94);
        let m = build_ring_expr("M2(Z101)").unwrap();
        let a = parse_literal(&m, "[[3,9],[-7,-2]]").unwrap();
        assert_eq!(print_literal(&m, a), "[[3,9],[94,99]]");
    }

    #[test]
    fn triangular_rejects_below_diagonal() {
        let r = build_ring_expr("T2(Z2)").unwrap();
        assert!(parse_literal(&r, "[[1,0],[1,1]]").is_err());
        assert_eq!(
            parse_literal(&r, "[[1,0],[0,1]]").unwrap(),
            r.one()
        );
    }

    #[test]
    fn whitespace_tolerated() {
        let r = build_ring_expr("M2(Z3)").unwrap();
        let a = parse_literal(&r, " [[1, 2], [0, 1]] ").unwrap();
        assert_eq!(print_literal(&r, a), "[[1,2],[0,1]]");
    }
}
