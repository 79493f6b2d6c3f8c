//! Drawing data model and the line-oriented `.drw` text format.
//!
//! ```text
//! drawing <id>
//! ldiv <positive decimal>
//! content <theory|setup|both>
//! targets <t1> <t2> <t3> <t4> <t5>      (optional)
//! polyline
//! <x> <y>
//! ...
//! end
//! ```
//!
//! `#` starts a comment, blank lines are ignored and coordinates are in
//! millimetres. A file holds exactly one drawing.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::TargetVector;
use crate::format;
use crate::scalar::Real;

/// Consecutive vertices closer than this are rejected as duplicates (mm).
pub const MIN_VERTEX_SPACING: f64 = 1e-9;

/// First and last vertex within this distance make a polyline closed (mm).
pub const CLOSURE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(&self, other: &Self) -> (T, T) {
        (self.x - other.x, self.y - other.y)
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Self::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// An open or closed chain of at least two distinct vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    vertices: Vec<Point<T>>,
}

impl<T: Real> Polyline<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidDrawing(format!(
                "polyline needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidDrawing(format!("vertex {i} is not finite")));
        }
        let min_gap = T::lit(MIN_VERTEX_SPACING);
        if let Some(i) = vertices
            .windows(2)
            .position(|w| w[0].distance(&w[1]) <= min_gap)
        {
            return Err(Error::InvalidDrawing(format!(
                "duplicate consecutive vertices at index {} and {}",
                i,
                i + 1
            )));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn first(&self) -> Point<T> {
        self.vertices[0]
    }

    pub fn last(&self) -> Point<T> {
        self.vertices[self.vertices.len() - 1]
    }

    /// True when the chain returns to its starting vertex.
    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 2 && self.first().distance(&self.last()) <= T::lit(CLOSURE_TOLERANCE)
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn arc_length(&self) -> T {
        self.segments().map(|(a, b)| a.distance(&b)).sum()
    }

    /// Applies `f` to every vertex, re-validating the result.
    pub fn map_points(&self, f: impl Fn(Point<T>) -> Point<T>) -> Result<Self> {
        Self::new(self.vertices.iter().copied().map(f).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Content {
    Theory,
    Setup,
    Both,
}

impl Content {
    pub fn as_str(&self) -> &'static str {
        match self {
            Content::Theory => "theory",
            Content::Setup => "setup",
            Content::Both => "both",
        }
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Content {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Content::Theory),
            "setup" => Ok(Content::Setup),
            "both" => Ok(Content::Both),
            other => Err(Error::InvalidArgument(format!(
                "unknown content '{other}' (expected theory, setup or both)"
            ))),
        }
    }
}

/// Values that have to be supplied with a drawing rather than measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotations<T> {
    /// Line-diversity score, strictly positive.
    pub ldiv: T,
    pub content: Content,
    /// Hand-measured outputs; override computed targets when present.
    pub hand_targets: Option<TargetVector<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Drawing<T> {
    id: String,
    polylines: Vec<Polyline<T>>,
    annotations: Annotations<T>,
}

impl<T: Real> Drawing<T> {
    pub fn new(
        id: impl Into<String>,
        polylines: Vec<Polyline<T>>,
        annotations: Annotations<T>,
    ) -> Result<Self> {
        let id = id.into();
        validate_id(&id)?;
        if polylines.is_empty() {
            return Err(Error::InvalidDrawing("no polylines".into()));
        }
        if !(annotations.ldiv > T::zero()) || !annotations.ldiv.is_finite() {
            return Err(Error::InvalidDrawing(format!(
                "ldiv must be positive and finite, got {}",
                annotations.ldiv
            )));
        }
        if let Some(t) = &annotations.hand_targets {
            t.validate()?;
        }
        Ok(Self {
            id,
            polylines,
            annotations,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn polylines(&self) -> &[Polyline<T>] {
        &self.polylines
    }

    pub fn annotations(&self) -> &Annotations<T> {
        &self.annotations
    }

    pub fn ldiv(&self) -> T {
        self.annotations.ldiv
    }

    pub fn with_id(&self, id: impl Into<String>) -> Result<Self> {
        Self::new(id, self.polylines.clone(), self.annotations.clone())
    }

    pub fn with_ldiv(&self, ldiv: T) -> Result<Self> {
        let mut annotations = self.annotations.clone();
        annotations.ldiv = ldiv;
        Self::new(self.id.clone(), self.polylines.clone(), annotations)
    }

    /// Applies `f` to every vertex of every polyline.
    pub fn map_points(&self, f: impl Fn(Point<T>) -> Point<T>) -> Result<Self> {
        let polylines = self
            .polylines
            .iter()
            .map(|p| p.map_points(&f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.id.clone(), polylines, self.annotations.clone())
    }

    /// Axis-aligned bounds over all vertices: `(min, max)`.
    pub fn bounding_box(&self) -> (Point<T>, Point<T>) {
        bounding_box(
            self.polylines
                .iter()
                .flat_map(|p| p.vertices().iter().copied()),
        )
        .expect("drawing has vertices")
    }
}

pub(crate) fn bounding_box<T: Real>(
    points: impl IntoIterator<Item = Point<T>>,
) -> Option<(Point<T>, Point<T>)> {
    let mut it = points.into_iter();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (
            Point::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidDrawing("empty drawing id".into()));
    }
    if id
        .chars()
        .any(|c| c.is_whitespace() || c == '#' || c == ',')
    {
        return Err(Error::InvalidDrawing(format!(
            "drawing id '{id}' may not contain whitespace, '#' or ','"
        )));
    }
    Ok(())
}

/// Parses one drawing from `.drw` text.
pub fn parse_drawing<T: Real>(text: &str) -> Result<Drawing<T>> {
    Parser::default().run(text)
}

/// Renders a drawing as `.drw` text. Numbers use the shortest exact form, so
/// parsing the output reproduces the drawing bit for bit.
pub fn serialize_drawing<T: Real>(d: &Drawing<T>) -> String {
    let mut out = String::new();
    let a = &d.annotations;
    let _ = writeln!(out, "drawing {}", d.id);
    let _ = writeln!(out, "ldiv {}", format::exact(a.ldiv));
    let _ = writeln!(out, "content {}", a.content);
    if let Some(t) = &a.hand_targets {
        let vals: Vec<String> = t.values().iter().map(|v| format::exact(*v)).collect();
        let _ = writeln!(out, "targets {}", vals.join(" "));
    }
    for p in &d.polylines {
        out.push_str("polyline\n");
        for v in p.vertices() {
            let _ = writeln!(out, "{} {}", format::exact(v.x), format::exact(v.y));
        }
        out.push_str("end\n");
    }
    out
}

#[derive(Default)]
struct Parser<T> {
    id: Option<String>,
    ldiv: Option<T>,
    content: Option<Content>,
    targets: Option<TargetVector<T>>,
    polylines: Vec<Polyline<T>>,
    open: Option<(usize, Vec<Point<T>>)>,
}

fn syntax(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn number<T: Real>(line: usize, tok: &str, what: &str) -> Result<T> {
    let v: T = tok
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} '{tok}'")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("{what} '{tok}' is not finite")));
    }
    Ok(v)
}

impl<T: Real> Parser<T> {
    fn run(mut self, text: &str) -> Result<Drawing<T>> {
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            self.line(line, &toks)?;
        }
        if let Some((start, _)) = self.open {
            return Err(syntax(
                start,
                "polyline not terminated by 'end' before end of file",
            ));
        }
        let at_end = |reason: &str| syntax(last_line.max(1), reason.to_string());
        let id = self
            .id
            .ok_or_else(|| at_end("missing 'drawing <id>' header"))?;
        let ldiv = self.ldiv.ok_or_else(|| at_end("missing 'ldiv' line"))?;
        let content = self
            .content
            .ok_or_else(|| at_end("missing 'content' line"))?;
        if self.polylines.is_empty() {
            return Err(at_end("no polylines"));
        }
        Drawing::new(
            id,
            self.polylines,
            Annotations {
                ldiv,
                content,
                hand_targets: self.targets,
            },
        )
        .map_err(|e| at_end(&e.to_string()))
    }

    fn line(&mut self, line: usize, toks: &[&str]) -> Result<()> {
        if let Some((_, verts)) = &mut self.open {
            match toks {
                ["end"] => {
                    let (_, verts) = self.open.take().expect("open polyline");
                    let p = Polyline::new(verts).map_err(|e| match e {
                        Error::InvalidDrawing(r) => syntax(line, r),
                        other => other,
                    })?;
                    self.polylines.push(p);
                }
                [x, y] => {
                    let p = Point::new(number(line, x, "x")?, number(line, y, "y")?);
                    if let Some(prev) = verts.last() {
                        if prev.distance(&p) <= T::lit(MIN_VERTEX_SPACING) {
                            return Err(syntax(line, "duplicate consecutive vertex"));
                        }
                    }
                    verts.push(p);
                }
                _ => {
                    return Err(syntax(
                        line,
                        format!("expected '<x> <y>' or 'end', found '{}'", toks.join(" ")),
                    ))
                }
            }
            return Ok(());
        }

        let (key, args) = (toks[0], &toks[1..]);
        if self.id.is_none() && key != "drawing" {
            return Err(syntax(line, "file must start with 'drawing <id>'"));
        }
        match key {
            "drawing" => {
                if self.id.is_some() {
                    return Err(syntax(line, "only one drawing per file"));
                }
                let [id] = args else {
                    return Err(syntax(line, "expected 'drawing <id>'"));
                };
                validate_id(id).map_err(|e| syntax(line, e.to_string()))?;
                self.id = Some((*id).to_string());
            }
            "ldiv" => {
                let [v] = args else {
                    return Err(syntax(line, "expected 'ldiv <value>'"));
                };
                let v: T = number(line, v, "ldiv")?;
                if v <= T::zero() {
                    return Err(syntax(line, format!("ldiv must be positive, got {v}")));
                }
                self.once(line, "ldiv", self.ldiv.is_some())?;
                self.ldiv = Some(v);
            }
            "content" => {
                let [v] = args else {
                    return Err(syntax(line, "expected 'content <theory|setup|both>'"));
                };
                self.once(line, "content", self.content.is_some())?;
                self.content = Some(v.parse().map_err(|e: Error| syntax(line, e.to_string()))?);
            }
            "targets" => {
                if args.len() != 5 {
                    return Err(syntax(
                        line,
                        format!("expected 5 target values, got {}", args.len()),
                    ));
                }
                let mut vals = [T::zero(); 5];
                for (slot, tok) in vals.iter_mut().zip(args) {
                    *slot = number(line, tok, "target")?;
                }
                let t = TargetVector::new(vals);
                t.validate().map_err(|e| syntax(line, e.to_string()))?;
                self.once(line, "targets", self.targets.is_some())?;
                self.targets = Some(t);
            }
            "polyline" => {
                if !args.is_empty() {
                    return Err(syntax(line, "'polyline' takes no arguments"));
                }
                self.open = Some((line, Vec::new()));
            }
            other => return Err(syntax(line, format!("unknown keyword '{other}'"))),
        }
        Ok(())
    }

    fn once(&self, line: usize, key: &str, seen: bool) -> Result<()> {
        if seen {
            Err(syntax(line, format!("duplicate '{key}' line")))
        } else {
            Ok(())
        }
    }
}
