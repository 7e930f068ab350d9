//! Braid words, the text format, topological moves and closure conversion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A braid on `strands` strands as a signed generator sequence.
///
/// Generator `g` stands for `sigma_|g|`, inverted when `g < 0`; indices are
/// 1-based and satisfy `1 <= |g| <= strands - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBraid", into = "RawBraid")]
pub struct BraidWord {
    strands: usize,
    word: Vec<i32>,
}

#[derive(Serialize, Deserialize)]
struct RawBraid {
    strands: usize,
    word: Vec<i32>,
}

impl TryFrom<RawBraid> for BraidWord {
    type Error = Error;
    fn try_from(r: RawBraid) -> Result<Self> {
        BraidWord::new(r.strands, r.word)
    }
}

impl From<BraidWord> for RawBraid {
    fn from(b: BraidWord) -> Self {
        RawBraid { strands: b.strands, word: b.word }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureKind {
    Markov,
    Plat,
}

impl FromStr for ClosureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markov" => Ok(ClosureKind::Markov),
            "plat" => Ok(ClosureKind::Plat),
            _ => Err(Error::Config(format!("unknown closure {s:?}"))),
        }
    }
}

impl fmt::Display for ClosureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosureKind::Markov => "markov",
            ClosureKind::Plat => "plat",
        })
    }
}

/// Which way a Reidemeister III slide goes: `Raise` rewrites
/// `sigma_i sigma_{i+1} sigma_i`-shaped triples (outer index below the middle),
/// `Lower` the mirror shape `sigma_{i+1} sigma_i sigma_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlideDirection {
    Raise,
    Lower,
}

/// Moves that leave the Markov closure unchanged up to isotopy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkovMove {
    /// With `Some(g)`, insert `g, -g` before `position`; with `None`, remove
    /// the cancelling pair at `position, position + 1`.
    Poke { position: usize, generator: Option<i32> },
    /// Rewrite the triple starting at `position`.
    Slide { position: usize, direction: SlideDirection },
    /// Swap the letters at `position, position + 1` when their indices differ by 2 or more.
    Commute { position: usize },
    /// Append `sigma_strands^{sign}` on a new strand.
    Stabilize { sign: i32 },
    /// Remove a final `sigma_{strands-1}^{+-1}` that is the only use of that index.
    Destabilize,
    /// Rotate the word left by `offset`.
    Cycle { offset: usize },
}

impl BraidWord {
    pub fn new(strands: usize, word: Vec<i32>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::TooFewStrands(strands));
        }
        for &g in &word {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(Error::Range(format!("generator {g} on {strands} strands")));
            }
        }
        Ok(Self { strands, word })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    #[inline]
    pub fn strands(&self) -> usize {
        self.strands
    }

    /// Qubits used by the representation, `strands + 1`.
    #[inline]
    pub fn qubits(&self) -> usize {
        self.strands + 1
    }

    #[inline]
    pub fn word(&self) -> &[i32] {
        &self.word
    }

    pub fn into_word(self) -> Vec<i32> {
        self.word
    }

    #[inline]
    pub fn crossings(&self) -> usize {
        self.word.len()
    }

    pub fn writhe(&self) -> i64 {
        self.word.iter().map(|&g| g.signum() as i64).sum()
    }

    pub fn inverse(&self) -> Self {
        Self { strands: self.strands, word: self.word.iter().rev().map(|&g| -g).collect() }
    }

    /// Mirror: every crossing flipped, order kept.
    pub fn conjugate_mirror(&self) -> Self {
        Self { strands: self.strands, word: self.word.iter().map(|&g| -g).collect() }
    }

    /// Product `self * other`, applied left to right. Strand counts must agree.
    pub fn concat(&self, other: &BraidWord) -> Result<Self> {
        if self.strands != other.strands {
            return Err(Error::Range(format!(
                "strand counts differ: {} vs {}",
                self.strands, other.strands
            )));
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Ok(Self { strands: self.strands, word })
    }

    /// Same word seen on more strands.
    pub fn widen(&self, strands: usize) -> Result<Self> {
        if strands < self.strands {
            return Err(Error::Range(format!("cannot narrow {} to {strands}", self.strands)));
        }
        Ok(Self { strands, word: self.word.clone() })
    }

    /// Permutation induced on strand positions: entry `p` is the original
    /// strand sitting at position `p` after the braid.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands).collect();
        for &g in &self.word {
            let i = g.unsigned_abs() as usize;
            perm.swap(i - 1, i);
        }
        perm
    }

    /// Remove adjacent `g, -g` pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        Self { strands: self.strands, word: free_reduce(&self.word) }
    }

    pub fn apply_move(&self, m: MarkovMove) -> Result<Self> {
        let w = &self.word;
        let len = w.len();
        let na = |msg: String| Err(Error::MoveNotApplicable(msg));
        match m {
            MarkovMove::Poke { position, generator: Some(g) } => {
                if position > len {
                    return na(format!("poke position {position} beyond length {len}"));
                }
                if g == 0 || g.unsigned_abs() as usize >= self.strands {
                    return na(format!("generator {g} on {} strands", self.strands));
                }
                let mut word = w.clone();
                word.splice(position..position, [g, -g]);
                Ok(Self { strands: self.strands, word })
            }
            MarkovMove::Poke { position, generator: None } => {
                if position + 1 >= len || w[position] != -w[position + 1] {
                    return na(format!("no cancelling pair at {position}"));
                }
                let mut word = w.clone();
                word.drain(position..position + 2);
                Ok(Self { strands: self.strands, word })
            }
            MarkovMove::Slide { position, direction } => {
                if position + 2 >= len {
                    return na(format!("no triple at {position}"));
                }
                let (a, b, c) = (w[position], w[position + 1], w[position + 2]);
                let Some(out) = slide_triple(a, b, c) else {
                    return na(format!("triple {a} {b} {c} does not slide"));
                };
                let raising = b.unsigned_abs() > a.unsigned_abs();
                if raising != (direction == SlideDirection::Raise) {
                    return na(format!("triple {a} {b} {c} slides the other way"));
                }
                let mut word = w.clone();
                word[position..position + 3].copy_from_slice(&out);
                Ok(Self { strands: self.strands, word })
            }
            MarkovMove::Commute { position } => {
                if position + 1 >= len {
                    return na(format!("no pair at {position}"));
                }
                if w[position].unsigned_abs().abs_diff(w[position + 1].unsigned_abs()) < 2 {
                    return na(format!("letters at {position} do not commute"));
                }
                let mut word = w.clone();
                word.swap(position, position + 1);
                Ok(Self { strands: self.strands, word })
            }
            MarkovMove::Stabilize { sign } => {
                if sign != 1 && sign != -1 {
                    return na(format!("stabilize sign {sign}"));
                }
                let mut word = w.clone();
                word.push(sign * self.strands as i32);
                Ok(Self { strands: self.strands + 1, word })
            }
            MarkovMove::Destabilize => {
                let top = (self.strands - 1) as i32;
                let uses = w.iter().filter(|g| g.abs() == top).count();
                if self.strands < 3 || uses != 1 || w.last().map(|g| g.abs()) != Some(top) {
                    return na("last letter is not the unique top generator".into());
                }
                let mut word = w.clone();
                word.pop();
                Ok(Self { strands: self.strands - 1, word })
            }
            MarkovMove::Cycle { offset } => {
                let mut word = w.clone();
                if len > 0 {
                    word.rotate_left(offset % len);
                }
                Ok(Self { strands: self.strands, word })
            }
        }
    }
}

/// Reidemeister III on a triple `x^e1 y^f x^e3` with `|x|, |y|` adjacent:
/// returns `y^e3 x^f y^e1`. The only triples that do not slide are those with
/// `e1 = e3 != f`.
pub fn slide_triple(a: i32, b: i32, c: i32) -> Option<[i32; 3]> {
    let (x, y) = (a.abs(), b.abs());
    if c.abs() != x || x.abs_diff(y) != 1 {
        return None;
    }
    let (e1, f, e3) = (a.signum(), b.signum(), c.signum());
    if e1 == e3 && e1 != f {
        return None;
    }
    Some([e3 * y, f * x, e1 * y])
}

pub(crate) fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &g in word {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.strands)?;
        for g in &self.word {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_braid(s)
    }
}

/// Parses `"<strands> : <g1> <g2> ..."`. Lines starting with `#` are ignored,
/// so a whole braid file can be passed in.
pub fn parse_braid(text: &str) -> Result<BraidWord> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join(" ");
    let (head, tail) = body
        .split_once(':')
        .ok_or_else(|| Error::Syntax("missing ':' after strand count".into()))?;
    let strands: usize = head
        .trim()
        .parse()
        .map_err(|_| Error::Syntax(format!("bad strand count {:?}", head.trim())))?;
    let mut word = Vec::new();
    for tok in tail.split_whitespace() {
        let g: i32 = tok.parse().map_err(|_| Error::Syntax(format!("bad generator {tok:?}")))?;
        word.push(g);
    }
    BraidWord::new(strands, word)
}

/// Parses a file holding one braid per non-comment line.
pub fn parse_braid_lines(text: &str) -> Result<Vec<BraidWord>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_braid)
        .collect()
}

pub fn serialize_braid(b: &BraidWord) -> String {
    b.to_string()
}

/// Generators that turn `k` adjacent cap pairs on `2k` strands into `k`
/// nested caps pairing strand `j` with strand `2k + 1 - j`.
fn nesting_word(k: usize, sign: i32) -> Vec<i32> {
    let mut w = Vec::new();
    for m in 1..k {
        for g in (m + 1)..=(2 * k - m) {
            w.push(sign * g as i32);
        }
    }
    w
}

/// A braid on `2k` strands whose plat closure is isotopic to the Markov
/// closure of `b` (on `k` strands).
///
/// `b` acts on strands `1..k`; strands `k+1..2k` are the return paths. The
/// top and bottom caps are rerouted so that strand `j` pairs with strand
/// `2k + 1 - j`, which closes each strand of `b` around the far side.
pub fn markov_to_plat(b: &BraidWord) -> BraidWord {
    let k = b.strands;
    let top = nesting_word(k, 1);
    let bottom: Vec<i32> = top.iter().rev().map(|&g| -g).collect();
    let mut word = top;
    word.extend_from_slice(&b.word);
    word.extend_from_slice(&bottom);
    BraidWord { strands: 2 * k, word }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let b = parse_braid("4 : 1 2 -1 3 2 -1").unwrap();
        assert_eq!(b.strands(), 4);
        assert_eq!(b.word(), &[1, 2, -1, 3, 2, -1]);
        assert_eq!(b.writhe(), 2);
        let e = parse_braid("2 :").unwrap();
        assert_eq!(e.crossings(), 0);
        assert_eq!(parse_braid("3 : 1 1 1").unwrap().writhe(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_braid("3 : 1 x"), Err(Error::Syntax(_))));
        assert!(matches!(parse_braid("3 : 3"), Err(Error::Range(_))));
        assert!(matches!(parse_braid("3 : 0"), Err(Error::Range(_))));
        assert!(matches!(parse_braid("1 :"), Err(Error::TooFewStrands(1))));
        assert!(matches!(parse_braid("3 1 2"), Err(Error::Syntax(_))));
    }

    #[test]
    fn parse_with_comments() {
        let b = parse_braid("# trefoil\n2 : 1 1 1\n").unwrap();
        assert_eq!(b.word(), &[1, 1, 1]);
    }

    #[test]
    fn inverse_and_mirror() {
        let b = BraidWord::new(4, vec![1, -3, 2]).unwrap();
        assert_eq!(b.inverse().word(), &[-2, 3, -1]);
        assert_eq!(BraidWord::new(3, vec![1, 2]).unwrap().inverse().word(), &[-2, -1]);
        let m = BraidWord::new(3, vec![1, 2, -1]).unwrap().conjugate_mirror();
        assert_eq!(m.word(), &[-1, -2, 1]);
        assert_eq!(m.writhe(), -1);
        let c = BraidWord::new(4, vec![3, -2]).unwrap();
        assert_eq!(c.conjugate_mirror().conjugate_mirror(), c);
        assert!(b.concat(&b.inverse()).unwrap().free_reduce().word().is_empty());
    }

    #[test]
    fn move_examples() {
        let b = BraidWord::new(3, vec![2]).unwrap();
        let p = b.apply_move(MarkovMove::Poke { position: 0, generator: Some(1) }).unwrap();
        assert_eq!(p.word(), &[1, -1, 2]);
        let back = p.apply_move(MarkovMove::Poke { position: 0, generator: None }).unwrap();
        assert_eq!(back, b);

        let s = BraidWord::new(3, vec![1, 2, 1]).unwrap();
        let t = s
            .apply_move(MarkovMove::Slide { position: 0, direction: SlideDirection::Raise })
            .unwrap();
        assert_eq!(t.word(), &[2, 1, 2]);
        assert!(s
            .apply_move(MarkovMove::Slide { position: 0, direction: SlideDirection::Lower })
            .is_err());

        let c = BraidWord::new(4, vec![1, 2, 3]).unwrap();
        assert_eq!(c.apply_move(MarkovMove::Cycle { offset: 1 }).unwrap().word(), &[2, 3, 1]);

        let st = c.apply_move(MarkovMove::Stabilize { sign: -1 }).unwrap();
        assert_eq!(st.strands(), 5);
        assert_eq!(st.word(), &[1, 2, 3, -4]);
        assert_eq!(st.apply_move(MarkovMove::Destabilize).unwrap(), c);
        assert!(c.apply_move(MarkovMove::Commute { position: 0 }).is_err());
    }

    #[test]
    fn slide_table() {
        assert_eq!(slide_triple(1, 2, -1), Some([-2, 1, 2]));
        assert_eq!(slide_triple(-1, 2, 1), Some([2, 1, -2]));
        assert_eq!(slide_triple(1, -2, 1), None);
        assert_eq!(slide_triple(1, 3, 1), None);
    }

    #[test]
    fn plat_conversion_shape() {
        let e = BraidWord::identity(2).unwrap();
        let p = markov_to_plat(&e);
        assert_eq!(p.strands(), 4);
        let b = BraidWord::new(3, vec![1, 2]).unwrap();
        assert_eq!(markov_to_plat(&b).strands(), 6);
    }

    #[test]
    fn serde_roundtrip() {
        let b = BraidWord::new(4, vec![1, -3]).unwrap();
        let j = serde_json::to_string(&b).unwrap();
        assert_eq!(j, r#"{"strands":4,"word":[1,-3]}"#);
        let back: BraidWord = serde_json::from_str(&j).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<BraidWord>(r#"{"strands":2,"word":[2]}"#).is_err());
    }
}
