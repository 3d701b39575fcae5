//! Compact byte encoding of terms, used to keep large reduction graphs in
//! memory. Names and formulas are interned; the encoding is a preorder walk
//! with one tag byte per node and LEB128 indices.

use std::collections::HashMap;

use crate::formula::Formula;
use crate::term::{Elim, MarkId, Side, Term, Var};

const VAR: u8 = 0;
const LAM: u8 = 1;
const APP: u8 = 2;
const PAIR: u8 = 3;
const INJ: u8 = 4;
const MU: u8 = 5;
const NAME: u8 = 6;
const MARK: u8 = 7;
const E_TERM: u8 = 8;
const E_PROJ: u8 = 9;
const E_CASE: u8 = 10;
const E_BOXED: u8 = 11;

#[derive(Clone, Debug, Default)]
pub(crate) struct Packer {
    names: Vec<Var>,
    name_ix: HashMap<Var, u32>,
    forms: Vec<Formula>,
    form_ix: HashMap<Formula, u32>,
}

fn put(out: &mut Vec<u8>, mut n: u32) {
    loop {
        let b = (n & 0x7f) as u8;
        n >>= 7;
        if n == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn get(bytes: &[u8], pos: &mut usize) -> u32 {
    let (mut n, mut shift) = (0u32, 0);
    loop {
        let b = bytes[*pos];
        *pos += 1;
        n |= u32::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return n;
        }
        shift += 7;
    }
}

impl Packer {
    pub fn pack(&mut self, t: &Term) -> Box<[u8]> {
        let mut out = Vec::with_capacity(64);
        self.term(t, &mut out);
        out.into_boxed_slice()
    }

    pub fn unpack(&self, bytes: &[u8]) -> Term {
        let mut pos = 0;
        self.read_term(bytes, &mut pos)
    }

    fn name(&mut self, x: &Var, out: &mut Vec<u8>) {
        let i = match self.name_ix.get(x) {
            Some(&i) => i,
            None => {
                let i = self.names.len() as u32;
                self.names.push(x.clone());
                self.name_ix.insert(x.clone(), i);
                i
            }
        };
        put(out, i);
    }

    fn form(&mut self, a: &Formula, out: &mut Vec<u8>) {
        let i = match self.form_ix.get(a) {
            Some(&i) => i,
            None => {
                let i = self.forms.len() as u32;
                self.forms.push(a.clone());
                self.form_ix.insert(a.clone(), i);
                i
            }
        };
        put(out, i);
    }

    fn term(&mut self, t: &Term, out: &mut Vec<u8>) {
        match t {
            Term::Var(x) => {
                out.push(VAR);
                self.name(x, out);
            }
            Term::Lam(x, a, b) | Term::Mu(x, a, b) => {
                out.push(if matches!(t, Term::Lam(..)) { LAM } else { MU });
                self.name(x, out);
                self.form(a, out);
                self.term(b, out);
            }
            Term::App(f, e) => {
                out.push(APP);
                self.term(f, out);
                self.elim(e, out);
            }
            Term::Pair(a, b) => {
                out.push(PAIR);
                self.term(a, out);
                self.term(b, out);
            }
            Term::Inj(s, a, b) => {
                out.push(INJ);
                out.push(s.index());
                self.form(a, out);
                self.term(b, out);
            }
            Term::Name(a, b) => {
                out.push(NAME);
                self.name(a, out);
                self.term(b, out);
            }
            Term::Mark(id, b) => {
                out.push(MARK);
                put(out, id.0);
                self.term(b, out);
            }
        }
    }

    fn elim(&mut self, e: &Elim, out: &mut Vec<u8>) {
        match e {
            Elim::Term(t) => {
                out.push(E_TERM);
                self.term(t, out);
            }
            Elim::Proj(s) => {
                out.push(E_PROJ);
                out.push(s.index());
            }
            Elim::Case(x1, t1, x2, t2) => {
                out.push(E_CASE);
                self.name(x1, out);
                self.term(t1, out);
                self.name(x2, out);
                self.term(t2, out);
            }
            Elim::Boxed(inner) => {
                out.push(E_BOXED);
                self.elim(inner, out);
            }
        }
    }

    fn read_name(&self, b: &[u8], pos: &mut usize) -> Var {
        self.names[get(b, pos) as usize].clone()
    }

    fn read_form(&self, b: &[u8], pos: &mut usize) -> Formula {
        self.forms[get(b, pos) as usize].clone()
    }

    fn read_side(b: &[u8], pos: &mut usize) -> Side {
        let s = Side::from_index(b[*pos]).expect("valid side");
        *pos += 1;
        s
    }

    fn read_term(&self, b: &[u8], pos: &mut usize) -> Term {
        let tag = b[*pos];
        *pos += 1;
        match tag {
            VAR => Term::Var(self.read_name(b, pos)),
            LAM | MU => {
                let x = self.read_name(b, pos);
                let a = self.read_form(b, pos);
                let body = Box::new(self.read_term(b, pos));
                if tag == LAM {
                    Term::Lam(x, a, body)
                } else {
                    Term::Mu(x, a, body)
                }
            }
            APP => {
                let f = self.read_term(b, pos);
                Term::App(Box::new(f), Box::new(self.read_elim(b, pos)))
            }
            PAIR => {
                let l = self.read_term(b, pos);
                Term::Pair(Box::new(l), Box::new(self.read_term(b, pos)))
            }
            INJ => {
                let s = Self::read_side(b, pos);
                let a = self.read_form(b, pos);
                Term::Inj(s, a, Box::new(self.read_term(b, pos)))
            }
            NAME => {
                let a = self.read_name(b, pos);
                Term::Name(a, Box::new(self.read_term(b, pos)))
            }
            MARK => {
                let id = MarkId(get(b, pos));
                Term::Mark(id, Box::new(self.read_term(b, pos)))
            }
            other => unreachable!("bad term tag {other}"),
        }
    }

    fn read_elim(&self, b: &[u8], pos: &mut usize) -> Elim {
        let tag = b[*pos];
        *pos += 1;
        match tag {
            E_TERM => Elim::Term(self.read_term(b, pos)),
            E_PROJ => Elim::Proj(Self::read_side(b, pos)),
            E_CASE => {
                let x1 = self.read_name(b, pos);
                let t1 = self.read_term(b, pos);
                let x2 = self.read_name(b, pos);
                let t2 = self.read_term(b, pos);
                Elim::Case(x1, t1, x2, t2)
            }
            E_BOXED => Elim::Boxed(Box::new(self.read_elim(b, pos))),
            other => unreachable!("bad eliminator tag {other}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn round_trip() {
        let mut p = Packer::default();
        for src in [
            "x",
            "\\x:A. (x y)",
            "mu a:A \\/ B. (a in2[A \\/ B] <u, (v p2)>)",
            "(m [x1.{n} | x2.{o}] [[e]] p)",
            "(m [[p1]])",
        ] {
            let t = parse_term(src).unwrap();
            let bytes = p.pack(&t);
            assert_eq!(p.unpack(&bytes), t, "{src}");
        }
        // 300 distinct names need two-byte indices
        for i in 0..300 {
            let t = Term::var(format!("z{i}"));
            let bytes = p.pack(&t);
            assert_eq!(p.unpack(&bytes), t);
        }
    }
}
