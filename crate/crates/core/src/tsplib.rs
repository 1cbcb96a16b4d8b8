//! TSPLIB reader and the distance functions every solver builds on.
//!
//! Only symmetric TSP files are handled. Coordinates come from
//! `NODE_COORD_SECTION` or, failing that, `DISPLAY_DATA_SECTION`; explicit
//! weights from `EDGE_WEIGHT_SECTION` in `FULL_MATRIX`, `UPPER_ROW`,
//! `UPPER_DIAG_ROW` or `LOWER_DIAG_ROW` layout.
//!
//! Node ids are 1-based in files and 0-based everywhere else.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tour::{check_permutation, Tour};

/// `EDGE_WEIGHT_TYPE` as declared by the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightType {
    Geo,
    Att,
    Euc2d,
    Explicit,
}

impl EdgeWeightType {
    pub fn keyword(self) -> &'static str {
        match self {
            EdgeWeightType::Geo => "GEO",
            EdgeWeightType::Att => "ATT",
            EdgeWeightType::Euc2d => "EUC_2D",
            EdgeWeightType::Explicit => "EXPLICIT",
        }
    }
}

impl FromStr for EdgeWeightType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "GEO" => Ok(EdgeWeightType::Geo),
            "ATT" => Ok(EdgeWeightType::Att),
            "EUC_2D" => Ok(EdgeWeightType::Euc2d),
            "EXPLICIT" => Ok(EdgeWeightType::Explicit),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightFormat {
    FullMatrix,
    UpperRow,
    UpperDiagRow,
    LowerDiagRow,
}

impl FromStr for EdgeWeightFormat {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FULL_MATRIX" => Ok(EdgeWeightFormat::FullMatrix),
            "UPPER_ROW" => Ok(EdgeWeightFormat::UpperRow),
            "UPPER_DIAG_ROW" => Ok(EdgeWeightFormat::UpperDiagRow),
            "LOWER_DIAG_ROW" => Ok(EdgeWeightFormat::LowerDiagRow),
            _ => Err(()),
        }
    }
}

/// Where an instance's coordinates were read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordSource {
    NodeCoord,
    DisplayData,
}

/// Distance function applied to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMetric {
    /// Unrounded Euclidean distance on the raw coordinate pairs.
    #[default]
    EuclidRaw,
    /// TSPLIB `EUC_2D`: Euclidean distance rounded to the nearest integer.
    Euc2d,
    /// TSPLIB `GEO`: great-circle distance on degree.minute coordinates.
    Geo,
    /// TSPLIB `ATT`: pseudo-Euclidean distance.
    Att,
    /// The file's explicit weight matrix.
    Explicit,
}

impl DistanceMetric {
    /// The canonical metric for a declared `EDGE_WEIGHT_TYPE`.
    pub fn canonical(declared: EdgeWeightType) -> Self {
        match declared {
            EdgeWeightType::Geo => DistanceMetric::Geo,
            EdgeWeightType::Att => DistanceMetric::Att,
            EdgeWeightType::Euc2d => DistanceMetric::Euc2d,
            EdgeWeightType::Explicit => DistanceMetric::Explicit,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistanceMetric::EuclidRaw => "euclid",
            DistanceMetric::Euc2d => "EUC_2D",
            DistanceMetric::Geo => "GEO",
            DistanceMetric::Att => "ATT",
            DistanceMetric::Explicit => "EXPLICIT",
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed symmetric TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub name: String,
    pub dimension: usize,
    /// One `(x, y)` pair per city, indexed by 0-based city id.
    pub coords: Option<Vec<(f64, f64)>>,
    pub coord_source: Option<CoordSource>,
    /// Full symmetric `dimension x dimension` matrix, row-major.
    pub explicit_weights: Option<Vec<f64>>,
    pub declared_metric: EdgeWeightType,
}

impl TspInstance {
    /// Builds an instance from plain coordinates, declared as `EUC_2D`.
    pub fn from_coords(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Self {
        TspInstance {
            name: name.into(),
            dimension: coords.len(),
            coords: Some(coords),
            coord_source: Some(CoordSource::NodeCoord),
            explicit_weights: None,
            declared_metric: EdgeWeightType::Euc2d,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_instance(&text)
    }

    /// Writes the instance back out in TSPLIB form. Explicit weights are
    /// emitted as `FULL_MATRIX`.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME: {}", self.name);
        let _ = writeln!(out, "TYPE: TSP");
        let _ = writeln!(out, "DIMENSION: {}", self.dimension);
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE: {}", self.declared_metric.keyword());
        if let Some(w) = &self.explicit_weights {
            let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
            let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
            for row in w.chunks(self.dimension) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        if let Some(coords) = &self.coords {
            let section = match self.coord_source {
                Some(CoordSource::DisplayData) => "DISPLAY_DATA_SECTION",
                _ => "NODE_COORD_SECTION",
            };
            let _ = writeln!(out, "{section}");
            for (i, (x, y)) in coords.iter().enumerate() {
                let _ = writeln!(out, "{} {} {}", i + 1, x, y);
            }
        }
        out.push_str("EOF\n");
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    NodeCoord,
    DisplayData,
    EdgeWeight,
}

struct Token<'a> {
    line: usize,
    text: &'a str,
}

struct RawSection<'a> {
    header_line: usize,
    last_line: usize,
    rows: Vec<(usize, Vec<&'a str>)>,
}

fn parse_num<T: FromStr>(tok: &Token<'_>) -> Result<T> {
    tok.text.parse().map_err(|_| Error::MalformedNumber {
        line: tok.line,
        token: tok.text.to_string(),
    })
}

fn section_keyword(word: &str) -> Option<Option<Section>> {
    match word {
        "NODE_COORD_SECTION" => Some(Some(Section::NodeCoord)),
        "DISPLAY_DATA_SECTION" => Some(Some(Section::DisplayData)),
        "EDGE_WEIGHT_SECTION" => Some(Some(Section::EdgeWeight)),
        // Recognised but irrelevant to a symmetric TSP; their rows are skipped.
        "FIXED_EDGES_SECTION" | "TOUR_SECTION" => Some(None),
        _ => None,
    }
}

/// Parses the contents of a TSPLIB `.tsp` file.
pub fn parse_instance(text: &str) -> Result<TspInstance> {
    let mut name = String::new();
    let mut dimension: Option<(usize, usize)> = None;
    let mut weight_type: Option<EdgeWeightType> = None;
    let mut weight_format: Option<(usize, EdgeWeightFormat)> = None;
    let mut node: Option<RawSection<'_>> = None;
    let mut display: Option<RawSection<'_>> = None;
    let mut weights: Option<RawSection<'_>> = None;

    let mut current: Option<Section> = None;
    let mut skipping = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        let starts_alpha = first.chars().next().is_some_and(|c| c.is_ascii_alphabetic());

        if starts_alpha {
            current = None;
            skipping = false;
            let head = first.trim_end_matches(':');
            if let Some(sec) = section_keyword(head) {
                match sec {
                    Some(s) => {
                        let slot = match s {
                            Section::NodeCoord => &mut node,
                            Section::DisplayData => &mut display,
                            Section::EdgeWeight => &mut weights,
                        };
                        if slot.is_some() {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("duplicate {head}"),
                            });
                        }
                        *slot = Some(RawSection {
                            header_line: line_no,
                            last_line: line_no,
                            rows: Vec::new(),
                        });
                        current = Some(s);
                    }
                    None => skipping = true,
                }
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `KEY: value`, got `{line}`"),
                });
            };
            let key = key.trim().to_ascii_uppercase();
            let value = value.trim();
            match key.as_str() {
                "NAME" => name = value.to_string(),
                "TYPE" => {
                    let t = value.to_ascii_uppercase();
                    if t != "TSP" {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unsupported TYPE `{value}`; only symmetric TSP"),
                        });
                    }
                }
                "DIMENSION" => {
                    let n = parse_num::<usize>(&Token {
                        line: line_no,
                        text: value,
                    })?;
                    dimension = Some((line_no, n));
                }
                "EDGE_WEIGHT_TYPE" => {
                    weight_type = Some(value.parse().map_err(|_| Error::UnknownEdgeWeightType {
                        line: line_no,
                        value: value.to_string(),
                    })?);
                }
                // FUNCTION appears in coordinate files and carries no information.
                "EDGE_WEIGHT_FORMAT" if !value.eq_ignore_ascii_case("FUNCTION") => {
                    let f = value.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("unsupported EDGE_WEIGHT_FORMAT `{value}`"),
                    })?;
                    weight_format = Some((line_no, f));
                }
                // COMMENT, DISPLAY_DATA_TYPE, NODE_COORD_TYPE, CAPACITY, ...
                _ => {}
            }
            continue;
        }

        if skipping {
            continue;
        }
        let Some(sec) = current else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("data outside any section: `{line}`"),
            });
        };
        let slot = match sec {
            Section::NodeCoord => node.as_mut(),
            Section::DisplayData => display.as_mut(),
            Section::EdgeWeight => weights.as_mut(),
        }
        .expect("section opened before data");
        slot.rows.push((line_no, line.split_whitespace().collect()));
        slot.last_line = line_no;
    }

    let (_, n) = dimension.ok_or(Error::MissingDimension { line: last_line })?;
    if n == 0 {
        let line = dimension.map(|d| d.0).unwrap_or(last_line);
        return Err(Error::Parse {
            line,
            msg: "DIMENSION must be positive".into(),
        });
    }
    let declared = weight_type.ok_or_else(|| Error::Parse {
        line: last_line,
        msg: "missing EDGE_WEIGHT_TYPE".into(),
    })?;

    let (coords, coord_source) = match (node, display) {
        (Some(sec), _) => (Some(read_coords(&sec, n)?), Some(CoordSource::NodeCoord)),
        (None, Some(sec)) => (Some(read_coords(&sec, n)?), Some(CoordSource::DisplayData)),
        (None, None) => (None, None),
    };

    let explicit_weights = match weights {
        Some(sec) => {
            let format = weight_format.map(|f| f.1).ok_or_else(|| Error::Parse {
                line: sec.header_line,
                msg: "EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT".into(),
            })?;
            Some(read_weights(&sec, n, format)?)
        }
        None => None,
    };

    if declared == EdgeWeightType::Explicit && explicit_weights.is_none() {
        return Err(Error::Parse {
            line: last_line,
            msg: "EDGE_WEIGHT_TYPE EXPLICIT without EDGE_WEIGHT_SECTION".into(),
        });
    }
    if coords.is_none() && explicit_weights.is_none() {
        return Err(Error::Parse {
            line: last_line,
            msg: "no coordinate or weight section".into(),
        });
    }

    Ok(TspInstance {
        name,
        dimension: n,
        coords,
        coord_source,
        explicit_weights,
        declared_metric: declared,
    })
}

fn read_coords(sec: &RawSection<'_>, n: usize) -> Result<Vec<(f64, f64)>> {
    if sec.rows.len() != n {
        return Err(Error::NodeCountMismatch {
            line: sec.last_line,
            expected: n,
            found: sec.rows.len(),
        });
    }
    let mut coords = vec![None; n];
    for (line, fields) in &sec.rows {
        let line = *line;
        if fields.len() < 3 {
            return Err(Error::Parse {
                line,
                msg: "expected `id x y`".into(),
            });
        }
        let tok = |i: usize| Token { line, text: fields[i] };
        let id: usize = parse_num(&tok(0))?;
        let x: f64 = parse_num(&tok(1))?;
        let y: f64 = parse_num(&tok(2))?;
        if id == 0 || id > n {
            return Err(Error::Parse {
                line,
                msg: format!("node id {id} outside 1..={n}"),
            });
        }
        if coords[id - 1].replace((x, y)).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("node id {id} repeated"),
            });
        }
    }
    Ok(coords.into_iter().map(|c| c.expect("all ids seen")).collect())
}

fn read_weights(sec: &RawSection<'_>, n: usize, format: EdgeWeightFormat) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (line, fields) in &sec.rows {
        for text in fields {
            let v: f64 = parse_num(&Token { line: *line, text })?;
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("negative or non-finite weight {v}"),
                });
            }
            values.push(v);
        }
    }
    let expected = match format {
        EdgeWeightFormat::FullMatrix => n * n,
        EdgeWeightFormat::UpperRow => n * (n - 1) / 2,
        EdgeWeightFormat::UpperDiagRow | EdgeWeightFormat::LowerDiagRow => n * (n + 1) / 2,
    };
    if values.len() != expected {
        return Err(Error::Parse {
            line: sec.last_line,
            msg: format!("expected {expected} edge weights, found {}", values.len()),
        });
    }

    let mut m = vec![0.0; n * n];
    let mut it = values.into_iter();
    let mut set = |i: usize, j: usize, v: f64| {
        m[i * n + j] = v;
        m[j * n + i] = v;
    };
    match format {
        EdgeWeightFormat::FullMatrix => {
            let full: Vec<f64> = it.collect();
            for i in 0..n {
                for j in 0..n {
                    let v = full[i * n + j];
                    if (v - full[j * n + i]).abs() > 0.0 || (i == j && v != 0.0) {
                        return Err(Error::Parse {
                            line: sec.last_line,
                            msg: format!("FULL_MATRIX not symmetric with zero diagonal at ({}, {})", i + 1, j + 1),
                        });
                    }
                }
            }
            return Ok(full);
        }
        EdgeWeightFormat::UpperRow => {
            for i in 0..n {
                for j in i + 1..n {
                    set(i, j, it.next().expect("counted"));
                }
            }
        }
        EdgeWeightFormat::UpperDiagRow => {
            for i in 0..n {
                for j in i..n {
                    let v = it.next().expect("counted");
                    if i != j {
                        set(i, j, v);
                    }
                }
            }
        }
        EdgeWeightFormat::LowerDiagRow => {
            for i in 0..n {
                for j in 0..=i {
                    let v = it.next().expect("counted");
                    if i != j {
                        set(i, j, v);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Dense symmetric distance matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DistanceMatrix<S> {
    /// Builds a matrix from a row-major `n x n` buffer, checking symmetry,
    /// the zero diagonal and nonnegativity.
    pub fn from_rows(n: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidParams(format!(
                "matrix buffer has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        for i in 0..n {
            if data[i * n + i] != S::zero() {
                return Err(Error::InvalidParams(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let v = data[i * n + j];
                if v != data[j * n + i] || v < S::zero() || !v.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "entry ({i}, {j}) breaks symmetry or is negative"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Euclidean matrix for a set of points.
    pub fn euclidean(points: &[(f64, f64)]) -> Self {
        let n = points.len();
        let pts: Vec<(S, S)> = points.iter().map(|&(x, y)| (S::of(x), S::of(y))).collect();
        Self::from_fn(n, |i, j| {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            (dx * dx + dy * dy).sqrt()
        })
    }

    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = vec![S::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Closed-cycle length of `order` with no validation.
    #[inline]
    pub fn cycle_length(&self, order: &[usize]) -> S {
        match order {
            [] | [_] => S::zero(),
            [first, .., last] => {
                let inner: S = order.windows(2).map(|w| self.get(w[0], w[1])).sum();
                inner + self.get(*last, *first)
            }
        }
    }

    /// Length of a closed tour, including the edge back to the start.
    pub fn tour_length(&self, tour: &Tour) -> Result<S> {
        self.checked_cycle_length(tour.as_slice())
    }

    pub fn checked_cycle_length(&self, order: &[usize]) -> Result<S> {
        if order.len() != self.n {
            return Err(Error::InvalidTour(format!(
                "tour visits {} cities, instance has {}",
                order.len(),
                self.n
            )));
        }
        check_permutation(order)?;
        Ok(self.cycle_length(order))
    }
}

/// Length of the closed tour under `dmat`.
pub fn tour_length<S: Scalar>(tour: &Tour, dmat: &DistanceMatrix<S>) -> Result<S> {
    dmat.tour_length(tour)
}

fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Latitude/longitude in radians from TSPLIB degree.minute notation.
fn geo_radians(v: f64) -> f64 {
    // TSPLIB's reference implementation uses this truncated value; optima depend on it.
    #[allow(clippy::approx_constant)]
    const PI: f64 = 3.141592;
    let deg = v.trunc();
    let min = v - deg;
    PI * (deg + 5.0 * min / 3.0) / 180.0
}

fn geo_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    const RRR: f64 = 6378.388;
    let (lat_a, lon_a) = (geo_radians(a.0), geo_radians(a.1));
    let (lat_b, lon_b) = (geo_radians(b.0), geo_radians(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    (RRR * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0).trunc()
}

fn att_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if t < r {
        t + 1.0
    } else {
        t
    }
}

/// Builds the distance matrix of `inst` under `metric`.
pub fn distance_matrix<S: Scalar>(inst: &TspInstance, metric: DistanceMetric) -> Result<DistanceMatrix<S>> {
    let coords = || {
        inst.coords.as_deref().ok_or(Error::MetricUnavailable {
            metric: metric.name(),
            needs: "coordinates",
        })
    };
    let rounded = |pts: &[(f64, f64)], f: fn((f64, f64), (f64, f64)) -> f64| {
        DistanceMatrix::from_fn(pts.len(), |i, j| S::of(f(pts[i], pts[j])))
    };
    Ok(match metric {
        DistanceMetric::EuclidRaw => DistanceMatrix::euclidean(coords()?),
        DistanceMetric::Euc2d => rounded(coords()?, |a, b| nint((a.0 - b.0).hypot(a.1 - b.1))),
        DistanceMetric::Geo => rounded(coords()?, geo_distance),
        DistanceMetric::Att => rounded(coords()?, att_distance),
        DistanceMetric::Explicit => {
            let w = inst.explicit_weights.as_deref().ok_or(Error::MetricUnavailable {
                metric: metric.name(),
                needs: "an EDGE_WEIGHT_SECTION",
            })?;
            DistanceMatrix {
                n: inst.dimension,
                data: w.iter().map(|&v| S::of(v)).collect(),
            }
        }
    })
}
