//! Text formats: complex expressions, Whitehead brackets, and signed sums of
//! words over `S_i`, `D_i` and `w_J`.
//!
//! ```text
//! complex := "pt" | "simplex(" int ("," int)* ")" | "bd(" complex ")"
//!          | "join(" complex "," complex ")"
//!          | "subst(" complex ";" complex ("," complex)* ")"
//! bracket := int | "[" bracket ("," bracket)+ "]"
//! sum     := ["+" | "-"] product (("+" | "-") product)*
//! product := factor (["*" | "^"] factor)*
//! factor  := int | "S" int | "D" int | "w" digits | "w{" int ("," int)* "}" | "(" sum ")"
//! ```
//!
//! Operands of `join` and the parts of `subst` are relabelled into consecutive
//! blocks `1, 2, ...` from left to right. In `w123` every digit is a vertex.

use crate::complexes::{relabel_blocks, Face, SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::whitehead::WhiteheadExpr;
use crate::Int;

/// A letter of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    S(Vertex),
    D(Vertex),
    W(Face),
}

impl Atom {
    /// Letters `S_i` and `w_J` have odd degree.
    pub fn is_odd(self) -> bool {
        !matches!(self, Atom::D(_))
    }
}

/// Expanded sum of words, in input order.
pub type WordSum = Vec<(Int, Vec<Atom>)>;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let message = match self.peek() {
                Some(found) => format!("expected '{c}', found '{found}'"),
                None => format!("expected '{c}', found end of input"),
            };
            Err(self.error(message))
        }
    }

    fn end(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        let len = self.src[start..].chars().take_while(char::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&self.src[start..start + len])
    }

    fn integer(&mut self) -> Result<Int> {
        self.skip_ws();
        let d = self.digits().ok_or_else(|| self.error("expected an integer"))?;
        Ok(d.parse().expect("ascii digits"))
    }

    fn vertex(&mut self) -> Result<Vertex> {
        self.skip_ws();
        let at = self.pos;
        let d = self.digits().ok_or_else(|| self.error("expected a vertex label"))?;
        match d.parse::<Vertex>() {
            Ok(v) if (1..=crate::complexes::MAX_LABEL).contains(&v) => Ok(v),
            _ => {
                self.pos = at;
                Err(self.error(format!("vertex label {d} out of range 1..=64")))
            }
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..].chars().take_while(|c| c.is_ascii_alphabetic()).count();
        self.pos += len;
        self.src[start..start + len].to_string()
    }

    // complexes

    fn complex(&mut self) -> Result<SimplicialComplex> {
        let at = self.pos;
        let name = self.word();
        let wrap = |p: &Self, r: Result<SimplicialComplex>| {
            r.map_err(|e| match e {
                Error::Parse { .. } => e,
                other => {
                    let mut q = Parser::new(p.src);
                    q.pos = at;
                    q.error(other.to_string())
                }
            })
        };
        match name.as_str() {
            "pt" => SimplicialComplex::point(1),
            "simplex" => {
                self.expect('(')?;
                let mut vs = vec![self.vertex()?];
                while self.eat(',') {
                    vs.push(self.vertex()?);
                }
                self.expect(')')?;
                let face = Face::new(vs.iter().copied()).map_err(|e| self.error(e.to_string()))?;
                wrap(self, SimplicialComplex::simplex(face))
            }
            "bd" => {
                self.expect('(')?;
                let inner = self.complex()?;
                self.expect(')')?;
                if !inner.is_simplex() || inner.num_vertices() < 2 {
                    let mut q = Parser::new(self.src);
                    q.pos = at;
                    return Err(q.error("bd() applies to a simplex with at least two vertices"));
                }
                wrap(self, SimplicialComplex::simplex_boundary(inner.vertices()))
            }
            "join" => {
                self.expect('(')?;
                let a = self.complex()?;
                self.expect(',')?;
                let b = self.complex()?;
                self.expect(')')?;
                let r = relabel_blocks(&[a, b]).and_then(|(v, _)| v[0].join(&v[1]));
                wrap(self, r)
            }
            "subst" => {
                self.expect('(')?;
                let k = self.complex()?;
                self.expect(';')?;
                let mut parts = vec![self.complex()?];
                while self.eat(',') {
                    parts.push(self.complex()?);
                }
                self.expect(')')?;
                let r = relabel_blocks(&parts).and_then(|(v, _)| k.substitute(&v));
                wrap(self, r)
            }
            "" => Err(self.error("expected a complex")),
            other => {
                self.pos = at;
                self.skip_ws();
                Err(self.error(format!("unknown complex constructor '{other}'")))
            }
        }
    }

    // brackets

    fn bracket(&mut self) -> Result<WhiteheadExpr> {
        if self.eat('[') {
            let at = self.pos;
            let mut children = vec![self.bracket()?];
            while self.eat(',') {
                children.push(self.bracket()?);
            }
            self.expect(']')?;
            WhiteheadExpr::bracket(children).map_err(|e| {
                let mut q = Parser::new(self.src);
                q.pos = at.saturating_sub(1);
                q.error(e.to_string())
            })
        } else {
            Ok(WhiteheadExpr::Leaf(self.vertex()?))
        }
    }

    // sums of words

    fn sum(&mut self) -> Result<WordSum> {
        let mut out = WordSum::new();
        let mut sign = Int::from(1);
        if self.eat('-') {
            sign = Int::from(-1);
        } else {
            self.eat('+');
        }
        loop {
            for (c, w) in self.product()? {
                out.push((c * &sign, w));
            }
            if self.eat('+') {
                sign = Int::from(1);
            } else if self.eat('-') {
                sign = Int::from(-1);
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '(' || c == 'S' || c == 'D' || c == 'w')
    }

    fn product(&mut self) -> Result<WordSum> {
        let mut acc: WordSum = vec![(Int::from(1), Vec::new())];
        let mut first = true;
        loop {
            let explicit = self.eat('*') || self.eat('^');
            if first && explicit {
                return Err(self.error("expected a factor"));
            }
            if !explicit && !first && !self.starts_factor() {
                break;
            }
            let f = self.factor()?;
            let mut next = WordSum::with_capacity(acc.len() * f.len());
            for (a, u) in &acc {
                for (b, v) in &f {
                    let mut word = u.clone();
                    word.extend_from_slice(v);
                    next.push((a * b, word));
                }
            }
            acc = next;
            first = false;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<WordSum> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let s = self.sum()?;
                self.expect(')')?;
                Ok(s)
            }
            Some(c) if c.is_ascii_digit() => Ok(vec![(self.integer()?, Vec::new())]),
            Some('S') => {
                self.pos += 1;
                Ok(vec![(Int::from(1), vec![Atom::S(self.vertex()?)])])
            }
            Some('D') => {
                self.pos += 1;
                Ok(vec![(Int::from(1), vec![Atom::D(self.vertex()?)])])
            }
            Some('w') => {
                self.pos += 1;
                let face = if self.src[self.pos..].starts_with('{') {
                    self.pos += 1;
                    let mut vs = vec![self.vertex()?];
                    while self.eat(',') {
                        vs.push(self.vertex()?);
                    }
                    self.expect('}')?;
                    vs
                } else {
                    let at = self.pos;
                    let d = self.digits().ok_or_else(|| self.error("expected the vertices of w"))?;
                    let vs: Vec<Vertex> = d.chars().map(|c| c.to_digit(10).expect("digit")).collect();
                    if vs.contains(&0) {
                        self.pos = at;
                        return Err(self.error("vertex 0 in w word"));
                    }
                    vs
                };
                let f = Face::new(face).map_err(|e| self.error(e.to_string()))?;
                Ok(vec![(Int::from(1), vec![Atom::W(f)])])
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a complex expression.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let mut p = Parser::new(text);
    let k = p.complex()?;
    p.end()?;
    Ok(k)
}

/// Parses a bracket expression such as `[[1,2,3],4,5]`.
pub fn parse_whitehead(text: &str) -> Result<WhiteheadExpr> {
    let mut p = Parser::new(text);
    let w = p.bracket()?;
    p.end()?;
    Ok(w)
}

/// Parses and expands a signed sum of words.
pub fn parse_word_sum(text: &str) -> Result<WordSum> {
    let mut p = Parser::new(text);
    let s = p.sum()?;
    p.end()?;
    Ok(s)
}

/// Sorts `items` by `key`, returning the sign of the permutation restricted
/// to the odd items.
pub fn koszul_sort<T: Copy, K: Ord>(items: &[T], key: impl Fn(&T) -> K, odd: impl Fn(&T) -> bool) -> (Vec<T>, i64) {
    let mut inversions = 0usize;
    for (a, x) in items.iter().enumerate() {
        if !odd(x) {
            continue;
        }
        for y in &items[a + 1..] {
            if odd(y) && key(x) > key(y) {
                inversions += 1;
            }
        }
    }
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|x| key(x));
    (sorted, if inversions.is_multiple_of(2) { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_expressions() {
        let k = parse_complex("subst(bd(simplex(1,2,3)); bd(simplex(1,2,3)), pt, pt)").unwrap();
        assert_eq!(k.missing_faces().len(), 4);
        assert_eq!(k.num_vertices(), 5);
        let j = parse_complex(" join( pt , pt ) ").unwrap();
        assert_eq!(j.facets(), &[Face::of(&[1, 2])]);
        assert!(matches!(parse_complex("bd(pt)"), Err(Error::Parse { .. })));
        match parse_complex("join(pt,\n  foo)") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn brackets() {
        assert_eq!(parse_whitehead("[[1,2,3],4,5]").unwrap().to_string(), "[[1,2,3],4,5]");
        assert!(parse_whitehead("[[6,13,[7,8,9],10]]").is_err());
        assert!(parse_whitehead("[1,2,1]").is_err());
        let big = parse_whitehead("[1,2,[3,4,5],[6,13,[7,8,9],10],[11,12]]").unwrap();
        assert_eq!(big.to_string(), "[[3,4,5],[[7,8,9],6,10,13],[11,12],1,2]");
    }

    #[test]
    fn word_sums() {
        let s = parse_word_sum("(D1D4S5 + D1*S4*D5 - 2 S1D4D5)S2").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[2].0, Int::from(-2));
        assert_eq!(s[0].1, vec![Atom::D(1), Atom::D(4), Atom::S(5), Atom::S(2)]);
        let t = parse_word_sum("(w145+w245+w345)^w123 - w{10,11}").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[3].1, vec![Atom::W(Face::of(&[10, 11]))]);
        assert!(parse_word_sum("w1 +").is_err());
        let (sorted, sign) = koszul_sort(&[Atom::S(5), Atom::D(1), Atom::S(2)], |a| match a {
            Atom::S(v) | Atom::D(v) => *v,
            Atom::W(_) => 0,
        }, |a| a.is_odd());
        assert_eq!(sorted, vec![Atom::D(1), Atom::S(2), Atom::S(5)]);
        assert_eq!(sign, -1);
    }
}
