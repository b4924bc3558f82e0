//! Positive braid words, their planar colored graphs, mutations, paths and
//! partition functions, and the snake-path reduction of doubled words.
//!
//! A graph on `m` strands has horizontal lines `1..=m` and strips `1..m`; strip
//! `j` lies between lines `j` and `j+1` and carries one vertical edge per
//! occurrence of `σ_j`. The faces of strip `j` are its cells `0..=#σ_j`, read
//! left to right. The unbounded regions above line 1 and below line `m` are
//! not faces.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::skewspace::{half, qi, BasisLabel, SkewSpace, SkewVector, Space, Q};
use crate::triangle::Triangle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BraidError {
    #[error("a braid word needs at least 2 strands, got {0}")]
    TooFewStrands(usize),
    #[error("letter σ{0} out of range for {1} strands")]
    LetterRange(usize, usize),
    #[error("no face at strip {0}, cell {1}")]
    NoFace(usize, usize),
    #[error("face ({strip},{cell}) is not mutable: {reason}")]
    NotMutable { strip: usize, cell: usize, reason: String },
    #[error("invalid boundary pair ({0},{1})")]
    Boundary(usize, usize),
    #[error("label layout does not match the word: {0}")]
    Shape(String),
    #[error("position {0} is not a letter of the word")]
    Position(usize),
    #[error("cannot parse braid word: {0}")]
    Parse(String),
    #[error("snake reduction stuck: {0}")]
    Stuck(String),
}

/// Two Artin generators commute iff their strands are at least two apart.
pub fn letters_commute(i: usize, j: usize) -> bool {
    i.abs_diff(j) >= 2
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<usize>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<usize>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        if let Some(&bad) = letters.iter().find(|&&i| i == 0 || i >= strands) {
            return Err(BraidError::LetterRange(bad, strands));
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Positions (0-based) of the occurrences of `σ_i`.
    pub fn positions(&self, i: usize) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, &l)| l == i).map(|(p, _)| p).collect()
    }

    pub fn count(&self, i: usize) -> usize {
        self.letters.iter().filter(|&&l| l == i).count()
    }

    /// Lexicographically least word in the commutation class.
    pub fn canonical(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: lex_normal_form(&self.letters, |a, b| letters_commute(*a, *b)) }
    }

    pub fn commutation_equivalent(&self, other: &BraidWord) -> bool {
        self.strands == other.strands && self.canonical() == other.canonical()
    }

    /// `w_0 = w_n ⋯ w_1` with `w_k = σ_1 ⋯ σ_k` on `N` strands.
    pub fn longest_e(big_n: usize) -> BraidWord {
        let n = big_n - 1;
        let letters = (1..=n).rev().flat_map(|k| 1..=k).collect();
        BraidWord { strands: big_n, letters }
    }

    /// `w̄_0 = w̄_n ⋯ w̄_1` with `w̄_k = σ_n σ_{n−1} ⋯ σ_{N−k}`.
    pub fn longest_f(big_n: usize) -> BraidWord {
        let n = big_n - 1;
        let letters = (1..=n).rev().flat_map(|k| (big_n - k..=n).rev()).collect();
        BraidWord { strands: big_n, letters }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.letters.iter().map(|i| format!("s{i}")).collect();
        write!(f, "{}:{}", self.strands, body.join(" "))
    }
}

/// Accepts `"3:s1 s2 s1"`, `"3:1,2,1"` or `"1 2 1"` (strands inferred).
impl FromStr for BraidWord {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, body) = match s.split_once(':') {
            Some((m, b)) => (Some(m.trim().parse::<usize>().map_err(|e| BraidError::Parse(e.to_string()))?), b),
            None => (None, s),
        };
        let letters = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                let t = t.trim_start_matches(['s', 'σ']);
                t.parse::<usize>().map_err(|e| BraidError::Parse(format!("{t}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = m.unwrap_or_else(|| letters.iter().max().map_or(2, |x| x + 1));
        BraidWord::new(m, letters)
    }
}

/// Lexicographic normal form in a trace monoid: repeatedly emit the least
/// letter that commutes with everything before it in the remaining word.
pub fn lex_normal_form<T: Ord + Clone>(word: &[T], commute: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let mut rest: Vec<T> = word.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            if (0..i).all(|j| commute(&rest[j], &rest[i]) && rest[j] != rest[i])
                && best.is_none_or(|b| rest[i] < rest[b])
            {
                best = Some(i);
            }
        }
        let b = best.expect("first letter is always available");
        out.push(rest.remove(b));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId {
    pub strip: usize,
    pub cell: usize,
}

impl FaceId {
    pub fn new(strip: usize, cell: usize) -> Self {
        FaceId { strip, cell }
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.strip, self.cell)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// End point of a vertical edge (a sink of that edge).
    Red,
    /// Start point of a vertical edge.
    Blue,
    /// Left boundary vertex.
    Source,
    /// Right boundary vertex.
    Sink,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub line: usize,
    /// Horizontal coordinate: 0 left boundary, `p+1` for letter `p`, `len+1` right boundary.
    pub x: usize,
    pub kind: VertexKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// The uncolored planar graph of a braid word.
#[derive(Clone, Debug)]
pub struct BraidGraph {
    pub word: BraidWord,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<FaceId>,
}

pub fn graph_from_word(word: &BraidWord) -> BraidGraph {
    let m = word.strands();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut per_line: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for line in 1..=m {
        per_line[line].push(vertices.len());
        vertices.push(Vertex { line, x: 0, kind: VertexKind::Source });
    }
    for (p, &i) in word.letters().iter().enumerate() {
        let top = vertices.len();
        vertices.push(Vertex { line: i, x: p + 1, kind: VertexKind::Blue });
        let bottom = vertices.len();
        vertices.push(Vertex { line: i + 1, x: p + 1, kind: VertexKind::Red });
        per_line[i].push(top);
        per_line[i + 1].push(bottom);
        edges.push(Edge { from: top, to: bottom, kind: EdgeKind::Vertical });
    }
    for (line, vs) in per_line.iter_mut().enumerate().skip(1) {
        vs.push(vertices.len());
        vertices.push(Vertex { line, x: word.len() + 1, kind: VertexKind::Sink });
        for w in vs.windows(2) {
            edges.push(Edge { from: w[0], to: w[1], kind: EdgeKind::Horizontal });
        }
    }
    let faces = (1..m).flat_map(|j| (0..=word.count(j)).map(move |c| FaceId::new(j, c))).collect();
    BraidGraph { word: word.clone(), vertices, edges, faces }
}

impl BraidGraph {
    pub fn to_json(&self) -> Value {
        let kind = |k: VertexKind| match k {
            VertexKind::Red => "red",
            VertexKind::Blue => "blue",
            VertexKind::Source => "source",
            VertexKind::Sink => "sink",
        };
        json!({
            "schema": crate::SCHEMA,
            "word": self.word.to_string(),
            "strands": self.word.strands(),
            "vertices": self.vertices.iter().map(|v| json!({"line": v.line, "x": v.x, "kind": kind(v.kind)})).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "from": e.from, "to": e.to,
                "kind": if e.kind == EdgeKind::Vertical { "vertical" } else { "horizontal" }
            })).collect::<Vec<_>>(),
            "faces": self.faces.iter().map(|f| json!({"strip": f.strip, "cell": f.cell})).collect::<Vec<_>>(),
        })
    }
}

/// The pairing a V-coloring must assign to every pair of faces, as dictated
/// by the separating edges. Keys are ordered pairs `(f, g)` with value
/// `(v_f, v_g)`; both orientations are stored.
pub fn required_pairings(word: &BraidWord) -> BTreeMap<(FaceId, FaceId), Q> {
    let m = word.strands();
    let mut out = BTreeMap::new();
    let mut put = |f: FaceId, g: FaceId, x: Q| {
        *out.entry((f, g)).or_insert(Q::from_integer(0)) += x;
        *out.entry((g, f)).or_insert(Q::from_integer(0)) -= x;
    };
    let mut seen = vec![0usize; m + 1];
    for &i in word.letters() {
        put(FaceId::new(i, seen[i]), FaceId::new(i, seen[i] + 1), qi(1));
        seen[i] += 1;
    }
    // Horizontal segments on interior lines separate strip j−1 (above) from strip j (below).
    for line in 2..m {
        let corners: Vec<(bool, usize, usize)> = {
            let (mut up, mut down) = (0, 0);
            let mut v = Vec::new();
            for &i in word.letters() {
                if i == line - 1 {
                    up += 1;
                    v.push((true, up, down));
                } else if i == line {
                    down += 1;
                    v.push((false, up, down));
                }
            }
            v
        };
        if corners.is_empty() {
            continue;
        }
        let above = |c: usize| FaceId::new(line - 1, c);
        let below = |c: usize| FaceId::new(line, c);
        let first_red = corners[0].0;
        put(below(0), above(0), if first_red { half() } else { -half() });
        for w in corners.windows(2) {
            let (l_red, _, _) = w[0];
            let (r_red, _, _) = w[1];
            let (u, d) = (w[0].1, w[0].2);
            match (l_red, r_red) {
                (true, false) => put(above(u), below(d), qi(1)),
                (false, true) => put(below(d), above(u), qi(1)),
                _ => {}
            }
        }
        let &(last_red, u, d) = corners.last().unwrap();
        put(above(u), below(d), if last_red { half() } else { -half() });
    }
    out.retain(|_, x| *x != Q::from_integer(0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// `σ_jσ_{j−1}σ_j → σ_{j−1}σ_jσ_{j−1}`, mutable face in the lower strip.
    BraidDown,
    /// `σ_jσ_{j+1}σ_j → σ_{j+1}σ_jσ_{j+1}`, mutable face in the upper strip.
    BraidUp,
    /// `σ_jσ_j → σ_j` on an outermost strip.
    Demazure,
}

#[derive(Clone, Debug)]
pub struct LabeledBraidGraph {
    word: BraidWord,
    space: Space,
    /// `labels[j-1][c]` is the vector of face `(j, c)`.
    labels: Vec<Vec<SkewVector>>,
}

impl PartialEq for LabeledBraidGraph {
    fn eq(&self, other: &Self) -> bool {
        self.word.commutation_equivalent(&other.word) && self.labels == other.labels
    }
}

impl LabeledBraidGraph {
    pub fn new(word: BraidWord, space: Space, labels: Vec<Vec<SkewVector>>) -> Result<Self, BraidError> {
        let m = word.strands();
        if labels.len() != m - 1 {
            return Err(BraidError::Shape(format!("{} strips of labels for {} strands", labels.len(), m)));
        }
        for (j, row) in labels.iter().enumerate() {
            if row.len() != word.count(j + 1) + 1 {
                return Err(BraidError::Shape(format!("strip {} has {} labels, needs {}", j + 1, row.len(), word.count(j + 1) + 1)));
            }
            if row.iter().any(|v| v.space().id() != space.id()) {
                return Err(BraidError::Shape(format!("strip {} has labels from another space", j + 1)));
            }
        }
        Ok(LabeledBraidGraph { word, space, labels })
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn strands(&self) -> usize {
        self.word.strands()
    }

    pub fn labels(&self) -> &[Vec<SkewVector>] {
        &self.labels
    }

    pub fn strip_labels(&self, strip: usize) -> &[SkewVector] {
        &self.labels[strip - 1]
    }

    pub fn label(&self, f: FaceId) -> Result<&SkewVector, BraidError> {
        self.labels
            .get(f.strip.wrapping_sub(1))
            .and_then(|r| r.get(f.cell))
            .ok_or(BraidError::NoFace(f.strip, f.cell))
    }

    pub fn faces(&self) -> Vec<FaceId> {
        (1..self.strands())
            .flat_map(|j| (0..self.labels[j - 1].len()).map(move |c| FaceId::new(j, c)))
            .collect()
    }

    pub fn graph(&self) -> BraidGraph {
        graph_from_word(&self.word)
    }

    /// Checks all three V-coloring conditions against the actual pairings.
    pub fn check_coloring(&self) -> Result<(), String> {
        let req = required_pairings(&self.word);
        let faces = self.faces();
        for (x, &f) in faces.iter().enumerate() {
            for &g in &faces[x + 1..] {
                let want = req.get(&(f, g)).copied().unwrap_or(Q::from_integer(0));
                let got = self.label(f).unwrap().pair(self.label(g).unwrap());
                if got != want {
                    return Err(format!("faces {f} and {g}: pairing {got}, coloring requires {want}"));
                }
            }
        }
        Ok(())
    }

    fn wall_positions(&self, strip: usize) -> Vec<usize> {
        self.word.positions(strip)
    }

    /// Classifies the local pattern around a face, or explains why it is not mutable.
    pub fn move_kind(&self, f: FaceId) -> Result<MoveKind, BraidError> {
        let m = self.strands();
        let not = |reason: &str| BraidError::NotMutable { strip: f.strip, cell: f.cell, reason: reason.to_string() };
        self.label(f)?;
        let walls = self.wall_positions(f.strip);
        if f.cell == 0 || f.cell >= walls.len() {
            return Err(not("face touches the left or right boundary"));
        }
        let (x1, x2) = (walls[f.cell - 1], walls[f.cell]);
        let between = &self.word.letters()[x1 + 1..x2];
        let up = between.iter().filter(|&&i| i + 1 == f.strip).count();
        let down = between.iter().filter(|&&i| i == f.strip + 1).count();
        match (up, down) {
            (1, 0) => Ok(MoveKind::BraidDown),
            (0, 1) => Ok(MoveKind::BraidUp),
            (0, 0) if f.strip == 1 || f.strip == m - 1 => Ok(MoveKind::Demazure),
            (0, 0) => Err(not("Demazure pattern on an interior strip")),
            _ => Err(not(&format!(
                "{up} crossing(s) of strip {} and {down} of strip {} between the walls",
                f.strip as i64 - 1,
                f.strip + 1
            ))),
        }
    }

    pub fn mutable_faces(&self) -> Vec<(FaceId, MoveKind)> {
        self.faces().into_iter().filter_map(|f| self.move_kind(f).ok().map(|k| (f, k))).collect()
    }

    pub fn mutate(&self, f: FaceId) -> Result<LabeledBraidGraph, BraidError> {
        let kind = self.move_kind(f)?;
        let j = f.strip;
        let c = f.cell;
        let walls = self.wall_positions(j);
        let (x1, x2) = (walls[c - 1], walls[c]);
        let letters = self.word.letters();
        let v = self.labels[j - 1][c].clone();
        let mut labels = self.labels.clone();
        let new_letters: Vec<usize> = match kind {
            MoveKind::Demazure => {
                let row = &mut labels[j - 1];
                let v2 = row.remove(c + 1);
                row[c] = &v2 + &v;
                letters.iter().enumerate().filter(|&(p, _)| p != x2).map(|(_, &l)| l).collect()
            }
            MoveKind::BraidDown | MoveKind::BraidUp => {
                let other = if kind == MoveKind::BraidDown { j - 1 } else { j + 1 };
                let y = (x1 + 1..x2).find(|&p| letters[p] == other).unwrap();
                let w = letters[..y].iter().filter(|&&l| l == other).count();
                // Strip j: two walls become one, the right neighbour absorbs v.
                let row = &mut labels[j - 1];
                let v3 = row.remove(c + 1);
                row[c] = &v3 + &v;
                // Strip `other`: one wall becomes two.
                let orow = &mut labels[other - 1];
                orow[w] = &orow[w] + &v;
                orow.insert(w + 1, -&v);
                let mut out = letters[..x1].to_vec();
                out.extend_from_slice(&letters[x1 + 1..y]);
                out.extend_from_slice(&[other, j, other]);
                out.extend_from_slice(&letters[y + 1..x2]);
                out.extend_from_slice(&letters[x2 + 1..]);
                out
            }
        };
        let word = BraidWord::new(self.strands(), new_letters)?;
        LabeledBraidGraph::new(word, self.space.clone(), labels)
    }

    /// Deletes the vertical edges at the given word positions and merges faces,
    /// summing their labels.
    pub fn merge_labels(&self, deleted: &[usize]) -> Result<LabeledBraidGraph, BraidError> {
        if let Some(&p) = deleted.iter().find(|&&p| p >= self.word.len()) {
            return Err(BraidError::Position(p));
        }
        let mut labels: Vec<Vec<SkewVector>> = Vec::new();
        for j in 1..self.strands() {
            let walls = self.wall_positions(j);
            let old = &self.labels[j - 1];
            let mut row = vec![old[0].clone()];
            for (w, &p) in walls.iter().enumerate() {
                if deleted.contains(&p) {
                    let last = row.last_mut().unwrap();
                    *last += &old[w + 1];
                } else {
                    row.push(old[w + 1].clone());
                }
            }
            labels.push(row);
        }
        let letters = self
            .word
            .letters()
            .iter()
            .enumerate()
            .filter(|(p, _)| !deleted.contains(p))
            .map(|(_, &l)| l)
            .collect();
        LabeledBraidGraph::new(BraidWord::new(self.strands(), letters)?, self.space.clone(), labels)
    }

    /// The graph between lines `a` and `b`, renumbered to strands `1..=b−a+1`.
    pub fn subgraph(&self, a: usize, b: usize) -> Result<LabeledBraidGraph, BraidError> {
        if !(1 <= a && a < b && b <= self.strands()) {
            return Err(BraidError::Boundary(a, b));
        }
        let letters = self.word.letters().iter().filter(|&&i| a <= i && i < b).map(|&i| i + 1 - a).collect();
        let labels = self.labels[a - 1..b - 1].to_vec();
        LabeledBraidGraph::new(BraidWord::new(b - a + 1, letters)?, self.space.clone(), labels)
    }

    /// All directed paths from left boundary `a` to right boundary `b`,
    /// smallest first: at the first strip where two paths differ, the one
    /// descending earlier is smaller.
    pub fn enumerate_paths(&self, a: usize, b: usize) -> Result<Vec<GraphPath>, BraidError> {
        if !(1 <= a && a < b && b <= self.strands()) {
            return Err(BraidError::Boundary(a, b));
        }
        let walls: Vec<Vec<usize>> = (a..b).map(|j| self.wall_positions(j)).collect();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.extend_paths(a, b, &walls, &mut stack, &mut out);
        Ok(out)
    }

    fn extend_paths(&self, a: usize, b: usize, walls: &[Vec<usize>], chosen: &mut Vec<usize>, out: &mut Vec<GraphPath>) {
        let depth = chosen.len();
        if depth == walls.len() {
            out.push(self.make_path(a, b, chosen));
            return;
        }
        let min_pos = if depth == 0 { None } else { Some(walls[depth - 1][chosen[depth - 1]]) };
        for (w, &p) in walls[depth].iter().enumerate() {
            if min_pos.is_none_or(|q| p > q) {
                chosen.push(w);
                self.extend_paths(a, b, walls, chosen, out);
                chosen.pop();
            }
        }
    }

    fn make_path(&self, a: usize, b: usize, chosen: &[usize]) -> GraphPath {
        let mut u = self.space.zero();
        let mut descents = Vec::new();
        for (d, &w) in chosen.iter().enumerate() {
            let strip = a + d;
            for c in 0..=w {
                u += &self.labels[strip - 1][c];
            }
            descents.push(Descent { strip, wall: w, position: self.wall_positions(strip)[w] });
        }
        let mut below = self.space.zero();
        for j in b..self.strands() {
            for v in &self.labels[j - 1] {
                below += v;
            }
        }
        GraphPath { a, b, descents, weight: &u + &below, adjusted: u }
    }

    /// `Z(Γ)` between boundaries `a` and `b` as the multiset of adjusted weights.
    pub fn partition_function(&self, a: usize, b: usize) -> Result<FormSum, BraidError> {
        let paths = self.enumerate_paths(a, b)?;
        Ok(FormSum::new(&self.space, paths.into_iter().map(|p| p.adjusted).collect()))
    }

    pub fn to_json(&self) -> Value {
        let mut g = self.graph().to_json();
        let faces: Vec<Value> = self
            .faces()
            .iter()
            .map(|f| json!({"strip": f.strip, "cell": f.cell, "label": self.label(*f).unwrap().to_json()}))
            .collect();
        g["faces"] = Value::Array(faces);
        g["space"] = self.space.to_json();
        g
    }

    pub fn from_json(v: &Value) -> Result<LabeledBraidGraph, String> {
        let space = SkewSpace::from_json(&v["space"]).map_err(|e| e.to_string())?;
        let word: BraidWord = v["word"].as_str().ok_or("missing word")?.parse().map_err(|e: BraidError| e.to_string())?;
        let mut labels: Vec<Vec<SkewVector>> =
            (1..word.strands()).map(|j| vec![space.zero(); word.count(j) + 1]).collect();
        for f in v["faces"].as_array().ok_or("missing faces")? {
            let strip = f["strip"].as_u64().ok_or("face strip")? as usize;
            let cell = f["cell"].as_u64().ok_or("face cell")? as usize;
            let label = SkewVector::from_json(&space, &f["label"]).map_err(|e| e.to_string())?;
            *labels
                .get_mut(strip.wrapping_sub(1))
                .and_then(|r| r.get_mut(cell))
                .ok_or(format!("face ({strip},{cell}) does not exist"))? = label;
        }
        LabeledBraidGraph::new(word, space, labels).map_err(|e| e.to_string())
    }
}

impl fmt::Display for LabeledBraidGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "word {}", self.word)?;
        for (j, row) in self.labels.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "strip {}: {}", j + 1, cells.join(" | "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Descent {
    pub strip: usize,
    /// Index of the vertical among the verticals of its strip.
    pub wall: usize,
    /// Position of the letter in the word.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphPath {
    pub a: usize,
    pub b: usize,
    pub descents: Vec<Descent>,
    /// Sum of the labels of all faces under the path.
    pub weight: SkewVector,
    /// `weight − w_{p_{b,b}}`.
    pub adjusted: SkewVector,
}

impl GraphPath {
    /// The divergence order of [`LabeledBraidGraph::enumerate_paths`].
    pub fn order(&self, other: &GraphPath) -> Ordering {
        let key = |p: &GraphPath| p.descents.iter().map(|d| d.position).collect::<Vec<_>>();
        key(self).cmp(&key(other))
    }

    /// Faces of each strip lying to the right of the path.
    pub fn faces_right(&self, g: &LabeledBraidGraph) -> Vec<usize> {
        self.descents.iter().map(|d| g.strip_labels(d.strip).len() - 1 - d.wall).collect()
    }
}

/// A formal `⊞`-sum of exponentials, kept as a sorted multiset of exponents.
#[derive(Clone, Debug)]
pub struct FormSum {
    space: Space,
    terms: Vec<SkewVector>,
}

impl PartialEq for FormSum {
    fn eq(&self, other: &Self) -> bool {
        self.space.id() == other.space.id() && self.terms == other.terms
    }
}

impl Eq for FormSum {}

impl FormSum {
    pub fn new(space: &Space, mut terms: Vec<SkewVector>) -> Self {
        terms.sort();
        FormSum { space: space.clone(), terms }
    }

    pub fn single(v: SkewVector) -> Self {
        FormSum { space: v.space().clone(), terms: vec![v] }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn terms(&self) -> &[SkewVector] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn union(&self, other: &FormSum) -> FormSum {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        FormSum::new(&self.space, t)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|v| v.to_json()).collect())
    }
}

impl fmt::Display for FormSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|v| format!("E({v})")).collect();
        write!(f, "{}", parts.join(" ⊞ "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    E,
    F,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "E" | "e" => Ok(Family::E),
            "F" | "f" => Ok(Family::F),
            _ => Err(format!("unknown family {s:?} (expected E or F)")),
        }
    }
}

/// `Γ_𝔼` (`e_{abc}` in cell `c` of strip `b`) or `Γ_𝔽` (`e_{abc}` in cell `b` of strip `a`).
pub fn standard_graph(t: &Triangle, family: Family) -> LabeledBraidGraph {
    let big_n = t.big_n();
    let (word, labels) = match family {
        Family::E => (
            BraidWord::longest_e(big_n),
            (1..big_n).map(|b| (0..=big_n - b).map(|c| t.e(big_n - b - c, b, c)).collect()).collect(),
        ),
        Family::F => (
            BraidWord::longest_f(big_n),
            (1..big_n).map(|j| {
                let a = big_n - j;
                (0..=big_n - a).map(|b| t.e(a, b, big_n - a - b)).collect()
            }).collect(),
        ),
    };
    LabeledBraidGraph::new(word, t.space().clone(), labels).expect("standard layout")
}

/// `𝔼_{r,s}` or `𝔽_{r,s}`.
pub fn standard_generator(t: &Triangle, family: Family, r: usize, s: usize) -> Result<FormSum, BraidError> {
    standard_graph(t, family).partition_function(r, s)
}

/// `Γ_{𝔼^{[j]}_{a,b}}`: the top strip keeps only its `j`-th vertical.
pub fn conditional_e(t: &Triangle, a: usize, b: usize, j: usize) -> Result<LabeledBraidGraph, BraidError> {
    let g = standard_graph(t, Family::E).subgraph(a, b)?;
    let walls = g.word.positions(1);
    if j == 0 || j > walls.len() {
        return Err(BraidError::Position(j));
    }
    let del: Vec<usize> = walls.iter().enumerate().filter(|&(k, _)| k + 1 != j).map(|(_, &p)| p).collect();
    g.merge_labels(&del)
}

/// `Γ_{𝔼^{>j}_{a,b}}`: the top strip loses its first `j` verticals.
pub fn conditional_e_after(t: &Triangle, a: usize, b: usize, j: usize) -> Result<LabeledBraidGraph, BraidError> {
    let g = standard_graph(t, Family::E).subgraph(a, b)?;
    let walls = g.word.positions(1);
    g.merge_labels(&walls[..j.min(walls.len())])
}

/// `Γ_{𝔽^{[1]}_{a,b}}` (`first = true`) or `Γ_{𝔽^{>1}_{a,b}}`.
pub fn conditional_f(t: &Triangle, a: usize, b: usize, first: bool) -> Result<LabeledBraidGraph, BraidError> {
    let g = standard_graph(t, Family::F).subgraph(a, b)?;
    let walls = g.word.positions(1);
    let del: Vec<usize> = if first { walls[1..].to_vec() } else { walls[..1].to_vec() };
    g.merge_labels(&del)
}

/// Partition function of a conditional graph; empty when no path survives
/// (a graph whose top strip lost all its verticals).
pub fn conditional_z(g: &LabeledBraidGraph) -> FormSum {
    if g.word.count(1) == 0 {
        return FormSum::new(g.space(), Vec::new());
    }
    g.partition_function(1, g.strands()).expect("boundaries of a subgraph")
}

// ---------------------------------------------------------------------------
// Snake paths

/// Weighted family of non-intersecting lattice paths. Rows `k` count from the
/// bottom (row 0 is the padding row), columns `l` from the left (column 0 is
/// the padding column). `value[k][l]` is the index of the path through the
/// vertex, or 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SnakeMatrix {
    pub n: usize,
    pub values: Vec<Vec<usize>>,
    pub weights: Vec<Vec<Option<SkewVector>>>,
}

impl SnakeMatrix {
    fn val(&self, k: isize, l: isize) -> usize {
        if k < 0 || l < 0 || k as usize > self.n || l as usize > self.n {
            0
        } else {
            self.values[k as usize][l as usize]
        }
    }

    fn weight(&self, k: usize, l: usize) -> Option<&SkewVector> {
        self.weights.get(k).and_then(|r| r.get(l)).and_then(|w| w.as_ref())
    }

    /// Whether the 2×2 block with bottom-left corner `(k,l)` is admissible.
    fn block_ok(&self, k: usize, l: usize) -> bool {
        let n = self.n as isize;
        let tl = self.values[k + 1][l] as isize;
        let tr = self.values[k + 1][l + 1] as isize;
        let bl = self.values[k][l] as isize;
        let br = self.values[k][l + 1] as isize;
        if [tl, tr, bl, br].iter().any(|&x| x < 0 || x > n) {
            return false;
        }
        let i = bl;
        let shapes = [
            (i - 1, i - 1, i - 1),
            (i, i - 1, i - 1),
            (i - 1, i - 1, i),
            (i, i - 1, i),
            (i - 1, i - 2, i - 1),
        ];
        if (tl, tr, bl, br) == (0, 0, 0, 0) {
            return true;
        }
        i >= 1 && shapes.iter().any(|&(a, b, c)| (tl, tr, br) == (a, b, c) && a >= 0 && b >= 0 && c >= 0)
    }

    pub fn is_admissible(&self) -> bool {
        (0..self.n).all(|k| (0..self.n).all(|l| (k, l) == (0, 0) || self.block_ok(k, l)))
    }

    fn blocks_around_ok(&self, k: usize, l: usize) -> bool {
        let ks = k.saturating_sub(1)..=k.min(self.n - 1);
        ks.flat_map(|kk| (l.saturating_sub(1)..=l.min(self.n - 1)).map(move |ll| (kk, ll)))
            .all(|(kk, ll)| (kk, ll) == (0, 0) || self.block_ok(kk, ll))
    }

    pub fn can_mutate(&self, k: usize, l: usize) -> bool {
        if !(1..=self.n).contains(&k) || !(1..=self.n).contains(&l) || self.values[k][l] == 0 {
            return false;
        }
        let mut p = self.clone();
        p.values[k][l] -= 1;
        p.blocks_around_ok(k, l)
    }

    /// Lowers the entry at `(k,l)` and updates weights per the two local forms.
    pub fn mutate(&self, k: usize, l: usize) -> Result<SnakeMatrix, BraidError> {
        if !self.can_mutate(k, l) {
            return Err(BraidError::Stuck(format!("({k},{l}) is not mutable")));
        }
        let (ki, li) = (k as isize, l as isize);
        let i = self.values[k][l];
        let v = |dk: isize, dl: isize| self.val(ki + dk, li + dl);
        let mut out = self.clone();
        out.values[k][l] -= 1;
        if i >= 2 && v(1, 0) == i - 1 && v(1, 1) + 2 == i && v(0, -1) == i && v(0, 1) == i - 1 && v(-1, 0) == i {
            let w1 = self.weight(k + 1, l).cloned().ok_or_else(|| BraidError::Stuck(format!("missing weight at ({},{l})", k + 1)))?;
            let z1 = self.weight(k, l - 1).cloned().ok_or_else(|| BraidError::Stuck(format!("missing weight at ({k},{})", l - 1)))?;
            let z2 = self.weight(k, l).cloned().ok_or_else(|| BraidError::Stuck(format!("missing weight at ({k},{l})")))?;
            out.weights[k + 1][l] = Some(&(&w1 + &z2) - &z1);
            out.weights[k][l] = Some(w1);
        } else if i == 1 && v(1, 0) == 0 && v(1, 1) == 0 && v(0, -1) == 1 && v(0, 1) == 0 && v(-1, -1) == 2 && v(-1, 0) == 1 {
            out.weights[k][l] = None;
        } else {
            return Err(BraidError::Stuck(format!("mutation at ({k},{l}) matches no weighted local form")));
        }
        Ok(out)
    }

    /// First mutable vertex scanning rows top to bottom, columns left to right.
    pub fn first_mutable(&self) -> Option<(usize, usize)> {
        (1..=self.n).rev().flat_map(|k| (1..=self.n).map(move |l| (k, l))).find(|&(k, l)| self.can_mutate(k, l))
    }

    /// Vertices of path `i` in path order, bottom padding excluded.
    pub fn path_vertices(&self, i: usize) -> Vec<(usize, usize)> {
        let mut vs: Vec<(usize, usize)> =
            (1..=self.n).flat_map(|k| (0..=self.n).map(move |l| (k, l))).filter(|&(k, l)| self.values[k][l] == i).collect();
        vs.sort_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)));
        vs
    }

    /// Face labels of the row of path `i` in the associated graph: successive
    /// differences of the path's weights.
    pub fn row_labels(&self, i: usize) -> Vec<SkewVector> {
        let mut prev: Option<SkewVector> = None;
        let mut out = Vec::new();
        for (k, l) in self.path_vertices(i) {
            let w = self.weight(k, l).expect("weighted vertex").clone();
            out.push(match &prev {
                None => w.clone(),
                Some(p) => &w - p,
            });
            prev = Some(w);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..=self.n)
            .rev()
            .map(|k| {
                Value::Array(
                    (0..=self.n)
                        .map(|l| json!({"path": self.values[k][l], "weight": self.weight(k, l).map(|w| w.to_string())}))
                        .collect(),
                )
            })
            .collect();
        json!({"schema": crate::SCHEMA, "n": self.n, "rows_top_down": rows})
    }
}

impl fmt::Display for SnakeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (1..=self.n).rev() {
            let cells: Vec<String> = (0..=self.n)
                .map(|l| match self.weight(k, l) {
                    Some(w) if self.values[k][l] > 0 => format!("({}, {})", self.values[k][l], w),
                    _ => format!("{}", self.values[k][l]),
                })
                .collect();
            writeln!(f, "{}", cells.join("  "))?;
        }
        let bottom: Vec<String> = (1..=self.n).map(|l| self.values[0][l].to_string()).collect();
        write!(f, "    {}", bottom.join("  "))
    }
}

/// Weight space for the snake reduction: `∇_N` plus formal vectors `f[s,j]`
/// standing for the labels of the second copy of `w_0`.
pub struct SnakeSpace {
    pub triangle: Triangle,
    pub space: Space,
}

impl SnakeSpace {
    pub fn new(n: usize) -> Self {
        let triangle = Triangle::new(n + 1).expect("N ≥ 2");
        let tri = triangle.space();
        let mut labels: Vec<BasisLabel> = tri.labels().to_vec();
        for s in 1..=n {
            for j in 0..s {
                labels.push(BasisLabel::named(format!("f[{s},{j}]")));
            }
        }
        let entries: Vec<(usize, usize, Q)> = (0..tri.dim())
            .flat_map(|i| (0..tri.dim()).map(move |j| (i, j)))
            .filter(|&(i, j)| i < j && tri.eps(i, j) != Q::from_integer(0))
            .map(|(i, j)| (i, j, tri.eps(i, j)))
            .collect();
        let space = SkewSpace::from_entries(labels, &entries).expect("valid snake space");
        SnakeSpace { triangle, space }
    }

    /// `se_{s,k}` lifted into the snake space.
    pub fn se(&self, s: usize, k: usize) -> SkewVector {
        let v = self.triangle.se(s, k);
        self.space.from_coeffs(v.terms())
    }

    pub fn sf(&self, s: usize, j: usize) -> SkewVector {
        self.space.vector_of(&BasisLabel::named(format!("f[{s},{j}]"))).expect("formal vector")
    }

    fn empty(&self, n: usize) -> SnakeMatrix {
        let big_n = n + 1;
        let mut values = vec![vec![0; n + 1]; n + 1];
        // The corner continues both paddings; it never enters a checked block.
        values[0][0] = big_n;
        for l in 1..=n {
            values[0][l] = big_n - l;
        }
        SnakeMatrix { n, values, weights: vec![vec![None; n + 1]; n + 1] }
    }

    /// `P_n(2)`, the doubled longest word.
    pub fn doubled(&self) -> SnakeMatrix {
        let n = self.triangle.n();
        let big_n = n + 1;
        let mut p = self.empty(n);
        for k in 1..=n {
            for l in 0..=n {
                if l < k {
                    p.values[k][l] = big_n - k;
                    p.weights[k][l] = Some(self.se(k, l));
                } else {
                    p.values[k][l] = big_n - l;
                    p.weights[k][l] = Some(self.sf(l, l - k));
                }
            }
        }
        p
    }

    /// `P_n`, the reduced longest word, weighted by `se_{k+l,l}`.
    pub fn reduced(&self) -> SnakeMatrix {
        let n = self.triangle.n();
        let big_n = n + 1;
        let mut p = self.empty(n);
        for k in 1..=n {
            for l in 0..=n {
                if k + l < big_n {
                    p.values[k][l] = big_n - k - l;
                    p.weights[k][l] = Some(self.se(k + l, l));
                }
            }
        }
        p
    }
}

#[derive(Clone, Debug)]
pub struct SnakeReduction {
    pub schedule: Vec<(usize, usize)>,
    pub initial: SnakeMatrix,
    pub result: SnakeMatrix,
    pub target: SnakeMatrix,
}

impl SnakeReduction {
    pub fn reached_target(&self) -> bool {
        self.result == self.target
    }
}

/// Greedily mutates `P_n(2)` until no mutation applies.
pub fn snake_reduce_doubled(n: usize) -> Result<SnakeReduction, BraidError> {
    if n == 0 {
        return Err(BraidError::TooFewStrands(1));
    }
    let sp = SnakeSpace::new(n);
    let initial = sp.doubled();
    if !initial.is_admissible() {
        return Err(BraidError::Stuck("P_n(2) is not admissible".into()));
    }
    let mut cur = initial.clone();
    let mut schedule = Vec::new();
    // Every mutation lowers the sum of entries, so this loop terminates.
    while let Some((k, l)) = cur.first_mutable() {
        cur = cur.mutate(k, l)?;
        schedule.push((k, l));
        debug_assert!(cur.is_admissible());
    }
    let target = sp.reduced();
    Ok(SnakeReduction { schedule, initial, result: cur, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_words() {
        assert_eq!(BraidWord::longest_e(4).letters(), &[1, 2, 3, 1, 2, 1]);
        assert_eq!(BraidWord::longest_f(4).letters(), &[3, 2, 1, 3, 2, 3]);
    }

    #[test]
    fn parse_and_display() {
        let w: BraidWord = "3:s1 s2 s1".parse().unwrap();
        assert_eq!(w.to_string(), "3:s1 s2 s1");
        assert_eq!("1,2,1".parse::<BraidWord>().unwrap(), w);
        assert!("2:s2".parse::<BraidWord>().is_err());
    }

    #[test]
    fn canonical_form_sorts_commuting_letters() {
        let w = BraidWord::new(5, vec![3, 1, 4, 2]).unwrap();
        let v = BraidWord::new(5, vec![1, 3, 2, 4]).unwrap();
        assert!(w.commutation_equivalent(&v));
        let u = BraidWord::new(5, vec![1, 2, 3, 4]).unwrap();
        assert!(!w.commutation_equivalent(&u));
    }

    #[test]
    fn single_crossing_graph() {
        let g = graph_from_word(&BraidWord::new(2, vec![1]).unwrap());
        assert_eq!(g.faces.len(), 2);
        assert_eq!(g.edges.iter().filter(|e| e.kind == EdgeKind::Vertical).count(), 1);
    }

    #[test]
    fn snake_n1() {
        let r = snake_reduce_doubled(1).unwrap();
        assert!(r.reached_target());
        assert_eq!(r.schedule.len(), 1);
    }
}
