//! Scene metadata: categories, regions, oriented-box objects and panoramas
//! parsed from the line-oriented `.house` subset.
//!
//! Record grammar (tokens separated by whitespace, zero padding required):
//!
//! ```text
//! H <name> <label> 0 <#panoramas> 0 0 0 <#objects> <#categories> <#regions> 0 <#levels> 0 0 0 0 0
//! L <level_index> <#regions> <label> <px> <py> <pz> <xlo> <ylo> <zlo> <xhi> <yhi> <zhi> 0 0 0 0 0
//! R <region_index> <level_index> 0 0 <label_char> <px> <py> <pz> <xlo> <ylo> <zlo> <xhi> <yhi> <zhi> 0 0 0 0 0
//! C <category_index> <mapping_index> <name_with_underscores> <mpcat40_index> <mpcat40_name> 0 0 0 0 0
//! P <name> <panorama_index> <region_index> 0 <px> <py> <pz> 0 0 0 0 0
//! O <object_index> <region_index> <category_index> <px> <py> <pz> <a0x> <a0y> <a0z> <a1x> <a1y> <a1z> <r0> <r1> <r2> 0 0 0 0 0 0 0 0
//! ```

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::Vec3;

/// Tolerance on axis norms and on axis orthogonality.
pub const AXIS_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Category {
    pub index: usize,
    pub mapping_index: i64,
    /// Category name with underscores already mapped to spaces.
    pub name: String,
    pub mpcat40_index: i64,
    pub mpcat40_name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub index: usize,
    pub level_index: usize,
    pub label: char,
    pub position: Vec3,
    pub bbox_lo: Vec3,
    pub bbox_hi: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub index: usize,
    /// `-1` when the object is not assigned to a region.
    pub region_index: i64,
    pub category_index: usize,
    pub center: Vec3,
    pub axis0: Vec3,
    pub axis1: Vec3,
    /// Half-extents along axis0, axis1 and axis0 × axis1.
    pub radii: [f64; 3],
}

impl SceneObject {
    /// Third box axis, derived rather than stored.
    pub fn axis2(&self) -> Vec3 {
        self.axis0.cross(self.axis1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panorama {
    pub name: String,
    pub index: usize,
    pub region_index: i64,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SceneModel {
    pub scan_id: String,
    pub categories: Vec<Category>,
    pub regions: Vec<Region>,
    pub objects: Vec<SceneObject>,
    pub panoramas: Vec<Panorama>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("file is empty or does not start with an `H` header line")]
    MissingHeader,
    #[error("line {line}: malformed `{record}` record: {reason}")]
    Malformed {
        line: usize,
        record: char,
        reason: String,
    },
    #[error("line {line}: unknown record type `{tag}`")]
    UnknownRecord { line: usize, tag: String },
    #[error("line {line}: second header line")]
    DuplicateHeader { line: usize },
    #[error("header declares {declared} {record} records but {found} were found")]
    CountMismatch {
        record: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("{record} indices must be unique and contiguous from 0 (offending index {index})")]
    BadIndexSequence { record: &'static str, index: usize },
    #[error("{record} {index}: {field} refers to missing index {target}")]
    DanglingIndex {
        record: &'static str,
        index: usize,
        field: &'static str,
        target: i64,
    },
    #[error("{record} {index}: {reason}")]
    Invalid {
        record: &'static str,
        index: usize,
        reason: String,
    },
    #[error("object index {0} out of range")]
    ObjectOutOfRange(usize),
    #[error("category name is empty")]
    EmptyName,
}

impl SceneError {
    /// Source line number (1-based) when the error is tied to one line.
    pub fn line(&self) -> Option<usize> {
        match self {
            SceneError::Malformed { line, .. }
            | SceneError::UnknownRecord { line, .. }
            | SceneError::DuplicateHeader { line } => Some(*line),
            _ => None,
        }
    }
}

struct Tokens<'a> {
    line: usize,
    record: char,
    toks: Vec<&'a str>,
}

impl<'a> Tokens<'a> {
    fn err(&self, reason: impl Into<String>) -> SceneError {
        SceneError::Malformed {
            line: self.line,
            record: self.record,
            reason: reason.into(),
        }
    }

    fn expect_len(&self, n: usize) -> Result<(), SceneError> {
        if self.toks.len() != n {
            return Err(self.err(alloc::format!(
                "expected {} tokens, found {}",
                n,
                self.toks.len()
            )));
        }
        Ok(())
    }

    fn f64(&self, i: usize) -> Result<f64, SceneError> {
        let t = self.toks[i];
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(alloc::format!("token {} (`{}`) is not a finite number", i, t))),
        }
    }

    fn int(&self, i: usize) -> Result<i64, SceneError> {
        let t = self.toks[i];
        t.parse::<i64>()
            .map_err(|_| self.err(alloc::format!("token {} (`{}`) is not an integer", i, t)))
    }

    fn index(&self, i: usize) -> Result<usize, SceneError> {
        let v = self.int(i)?;
        usize::try_from(v)
            .map_err(|_| self.err(alloc::format!("token {} (`{}`) must be non-negative", i, v)))
    }

    fn vec3(&self, i: usize) -> Result<Vec3, SceneError> {
        Ok(Vec3::new(self.f64(i)?, self.f64(i + 1)?, self.f64(i + 2)?))
    }

    fn zeros(&self, from: usize) -> Result<(), SceneError> {
        for i in from..self.toks.len() {
            if self.f64(i)? != 0.0 {
                return Err(self.err(alloc::format!("padding token {} must be 0", i)));
            }
        }
        Ok(())
    }

    fn zero_at(&self, idx: &[usize]) -> Result<(), SceneError> {
        for &i in idx {
            if self.f64(i)? != 0.0 {
                return Err(self.err(alloc::format!("padding token {} must be 0", i)));
            }
        }
        Ok(())
    }
}

struct Header {
    scan_id: String,
    panoramas: usize,
    objects: usize,
    categories: usize,
    regions: usize,
    levels: usize,
}

fn parse_header(t: &Tokens) -> Result<Header, SceneError> {
    t.expect_len(18)?;
    t.zero_at(&[3, 5, 6, 7, 11])?;
    t.zeros(13)?;
    Ok(Header {
        scan_id: t.toks[1].to_string(),
        panoramas: t.index(4)?,
        objects: t.index(8)?,
        categories: t.index(9)?,
        regions: t.index(10)?,
        levels: t.index(12)?,
    })
}

/// Parses a `.house` subset file. Record lines after the header may appear
/// in any order; every list of the result is sorted by declared index.
pub fn parse_house(text: &str) -> Result<SceneModel, SceneError> {
    let mut header: Option<Header> = None;
    let mut levels: Vec<(usize, usize)> = Vec::new();
    let mut scene = SceneModel::default();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let tag = toks[0];
        let record = match tag {
            "H" | "L" | "R" | "C" | "P" | "O" => tag.chars().next().unwrap_or('?'),
            _ => {
                if header.is_none() {
                    return Err(SceneError::MissingHeader);
                }
                return Err(SceneError::UnknownRecord {
                    line,
                    tag: tag.to_string(),
                });
            }
        };
        let t = Tokens { line, record, toks };
        if record == 'H' {
            if header.is_some() {
                return Err(SceneError::DuplicateHeader { line });
            }
            header = Some(parse_header(&t)?);
            continue;
        }
        if header.is_none() {
            return Err(SceneError::MissingHeader);
        }
        match record {
            'L' => {
                t.expect_len(18)?;
                t.zeros(13)?;
                let index = t.index(1)?;
                let _declared_regions = t.index(2)?;
                t.vec3(4)?;
                t.vec3(7)?;
                t.vec3(10)?;
                levels.push((index, line));
            }
            'R' => {
                t.expect_len(20)?;
                t.zero_at(&[3, 4])?;
                t.zeros(15)?;
                let mut label_chars = t.toks[5].chars();
                let label = match (label_chars.next(), label_chars.next()) {
                    (Some(c), None) => c,
                    _ => return Err(t.err("region label must be a single character")),
                };
                let lo = t.vec3(9)?;
                let hi = t.vec3(12)?;
                if lo.x > hi.x || lo.y > hi.y || lo.z > hi.z {
                    return Err(t.err("bounding box lower corner exceeds upper corner"));
                }
                scene.regions.push(Region {
                    index: t.index(1)?,
                    level_index: t.index(2)?,
                    label,
                    position: t.vec3(6)?,
                    bbox_lo: lo,
                    bbox_hi: hi,
                });
            }
            'C' => {
                t.expect_len(11)?;
                t.zeros(6)?;
                let name = t.toks[3].replace('_', " ");
                if name.trim().is_empty() {
                    return Err(t.err("empty category name"));
                }
                scene.categories.push(Category {
                    index: t.index(1)?,
                    mapping_index: t.int(2)?,
                    name,
                    mpcat40_index: t.int(4)?,
                    mpcat40_name: t.toks[5].to_string(),
                });
            }
            'P' => {
                t.expect_len(13)?;
                t.zero_at(&[4])?;
                t.zeros(8)?;
                scene.panoramas.push(Panorama {
                    name: t.toks[1].to_string(),
                    index: t.index(2)?,
                    region_index: t.int(3)?,
                    position: t.vec3(5)?,
                });
            }
            'O' => {
                t.expect_len(24)?;
                t.zeros(16)?;
                let obj = SceneObject {
                    index: t.index(1)?,
                    region_index: t.int(2)?,
                    category_index: t.index(3)?,
                    center: t.vec3(4)?,
                    axis0: t.vec3(7)?,
                    axis1: t.vec3(10)?,
                    radii: [t.f64(13)?, t.f64(14)?, t.f64(15)?],
                };
                if let Err(reason) = check_object_shape(&obj) {
                    return Err(t.err(reason));
                }
                scene.objects.push(obj);
            }
            _ => unreachable!(),
        }
    }

    let header = header.ok_or(SceneError::MissingHeader)?;
    scene.scan_id = header.scan_id;

    let check = |record: &'static str, declared: usize, found: usize| {
        if declared != found {
            Err(SceneError::CountMismatch {
                record,
                declared,
                found,
            })
        } else {
            Ok(())
        }
    };
    check("level", header.levels, levels.len())?;
    check("region", header.regions, scene.regions.len())?;
    check("category", header.categories, scene.categories.len())?;
    check("panorama", header.panoramas, scene.panoramas.len())?;
    check("object", header.objects, scene.objects.len())?;

    levels.sort();
    check_sequence("level", levels.iter().map(|l| l.0))?;
    for r in &scene.regions {
        if r.level_index >= header.levels {
            return Err(SceneError::DanglingIndex {
                record: "region",
                index: r.index,
                field: "level_index",
                target: r.level_index as i64,
            });
        }
    }

    scene.sort_by_index();
    scene.validate()?;
    Ok(scene)
}

fn check_object_shape(obj: &SceneObject) -> Result<(), String> {
    let n0 = obj.axis0.norm();
    let n1 = obj.axis1.norm();
    if libm::fabs(n0 - 1.0) > AXIS_TOLERANCE {
        return Err(alloc::format!("axis0 norm {} is not 1", n0));
    }
    if libm::fabs(n1 - 1.0) > AXIS_TOLERANCE {
        return Err(alloc::format!("axis1 norm {} is not 1", n1));
    }
    let d = libm::fabs(obj.axis0.dot(obj.axis1));
    if d > AXIS_TOLERANCE {
        return Err(alloc::format!("axes are not orthogonal (|a0·a1| = {})", d));
    }
    if obj.radii.iter().any(|r| *r < 0.0) {
        return Err("negative half-extent".to_string());
    }
    Ok(())
}

fn check_sequence(
    record: &'static str,
    indices: impl Iterator<Item = usize>,
) -> Result<(), SceneError> {
    for (expected, index) in indices.enumerate() {
        if index != expected {
            return Err(SceneError::BadIndexSequence { record, index });
        }
    }
    Ok(())
}

impl SceneModel {
    pub fn sort_by_index(&mut self) {
        self.categories.sort_by_key(|c| c.index);
        self.regions.sort_by_key(|r| r.index);
        self.objects.sort_by_key(|o| o.index);
        self.panoramas.sort_by_key(|p| p.index);
    }

    /// Checks every invariant of a scene whose lists are already sorted by
    /// index: contiguous indices, resolvable cross-references, orthonormal
    /// object axes and unique panorama names.
    pub fn validate(&self) -> Result<(), SceneError> {
        check_sequence("category", self.categories.iter().map(|c| c.index))?;
        check_sequence("region", self.regions.iter().map(|r| r.index))?;
        check_sequence("object", self.objects.iter().map(|o| o.index))?;
        check_sequence("panorama", self.panoramas.iter().map(|p| p.index))?;

        for c in &self.categories {
            if c.name.trim().is_empty() {
                return Err(SceneError::Invalid {
                    record: "category",
                    index: c.index,
                    reason: "empty name".to_string(),
                });
            }
        }
        for r in &self.regions {
            let (lo, hi) = (r.bbox_lo, r.bbox_hi);
            if lo.x > hi.x || lo.y > hi.y || lo.z > hi.z {
                return Err(SceneError::Invalid {
                    record: "region",
                    index: r.index,
                    reason: "bounding box lower corner exceeds upper corner".to_string(),
                });
            }
        }
        let region_ok = |idx: i64| idx == -1 || (idx >= 0 && (idx as usize) < self.regions.len());
        for o in &self.objects {
            if o.category_index >= self.categories.len() {
                return Err(SceneError::DanglingIndex {
                    record: "object",
                    index: o.index,
                    field: "category_index",
                    target: o.category_index as i64,
                });
            }
            if !region_ok(o.region_index) {
                return Err(SceneError::DanglingIndex {
                    record: "object",
                    index: o.index,
                    field: "region_index",
                    target: o.region_index,
                });
            }
            check_object_shape(o).map_err(|reason| SceneError::Invalid {
                record: "object",
                index: o.index,
                reason,
            })?;
        }
        let mut names = BTreeSet::new();
        for p in &self.panoramas {
            if !region_ok(p.region_index) {
                return Err(SceneError::DanglingIndex {
                    record: "panorama",
                    index: p.index,
                    field: "region_index",
                    target: p.region_index,
                });
            }
            if !names.insert(p.name.as_str()) {
                return Err(SceneError::Invalid {
                    record: "panorama",
                    index: p.index,
                    reason: alloc::format!("duplicate name `{}`", p.name),
                });
            }
        }
        Ok(())
    }

    /// Lowercased category name of an object, words separated by one space.
    pub fn category_name(&self, object_index: usize) -> Result<String, SceneError> {
        let obj = self
            .objects
            .get(object_index)
            .ok_or(SceneError::ObjectOutOfRange(object_index))?;
        let cat = &self.categories[obj.category_index];
        Ok(normalize_name(&cat.name))
    }

    pub fn panorama(&self, name: &str) -> Option<&Panorama> {
        self.panoramas.iter().find(|p| p.name == name)
    }

    /// Region of the panorama with this name, `-1` when unknown.
    pub fn region_of(&self, viewpoint: &str) -> i64 {
        self.panorama(viewpoint).map_or(-1, |p| p.region_index)
    }
}

pub(crate) fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for word in name.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Last whitespace-separated token of a category name.
pub fn head_noun(name: &str) -> Result<String, SceneError> {
    name.split_whitespace()
        .last()
        .map(|w| w.chars().flat_map(char::to_lowercase).collect())
        .ok_or(SceneError::EmptyName)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    pub(crate) const FIXTURE: &str = "\
H toy_scan house 0 4 0 0 0 3 2 2 0 1 0 0 0 0 0
L 0 2 floor0 0 0 0 -5 -5 -1 5 5 3 0 0 0 0 0
R 0 0 0 0 b 1 1 0 -5 -5 0 0 5 3 0 0 0 0 0
R 1 0 0 0 k -2 1 0 0 -5 0 5 5 3 0 0 0 0 0
C 0 3 chest_of_drawers 13 chest_of_drawers 0 0 0 0 0
C 1 7 Painting 14 picture 0 0 0 0 0
P vp_a 0 0 0 0 0 1.5 0 0 0 0 0
P vp_b 1 0 0 2 0 1.5 0 0 0 0 0
P vp_c 2 1 0 2 2 1.5 0 0 0 0 0
P vp_d 3 -1 0 0 2 1.5 0 0 0 0 0
O 0 0 0 1 1 0.5 1 0 0 0 1 0 0.5 0.3 0.5 0 0 0 0 0 0 0 0
O 1 1 1 3 3 1.5 0 1 0 1 0 0 1 0.6 0 0 0 0 0 0 0 0 0
O 2 -1 0 -1 -1 0.5 1 0 0 0 1 0 0.4 0.4 0.4 0 0 0 0 0 0 0 0
";

    #[test]
    fn parses_declared_counts() {
        let s = parse_house(FIXTURE).unwrap();
        assert_eq!(s.scan_id, "toy_scan");
        assert_eq!(s.regions.len(), 2);
        assert_eq!(s.objects.len(), 3);
        assert_eq!(s.categories.len(), 2);
        assert_eq!(s.panoramas.len(), 4);
        assert_eq!(s.objects[1].radii, [1.0, 0.6, 0.0]);
        assert_eq!(s.objects[1].axis2(), Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn zero_count_header() {
        let s = parse_house("H empty x 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n").unwrap();
        assert_eq!(s, SceneModel { scan_id: "empty".into(), ..Default::default() });
    }

    #[test]
    fn category_names() {
        let s = parse_house(FIXTURE).unwrap();
        assert_eq!(s.category_name(0).unwrap(), "chest of drawers");
        assert_eq!(s.category_name(1).unwrap(), "painting");
        assert_eq!(s.category_name(3), Err(SceneError::ObjectOutOfRange(3)));
    }

    #[test]
    fn head_nouns() {
        assert_eq!(head_noun("chest of drawers").unwrap(), "drawers");
        assert_eq!(head_noun("bed").unwrap(), "bed");
        assert_eq!(head_noun("   "), Err(SceneError::EmptyName));
    }

    #[test]
    fn record_order_does_not_matter() {
        let base = parse_house(FIXTURE).unwrap();
        let mut lines: Vec<&str> = FIXTURE.lines().collect();
        let header = lines.remove(0);
        lines.reverse();
        let shuffled = format!("{}\n{}\n", header, lines.join("\n"));
        assert_eq!(parse_house(&shuffled).unwrap(), base);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let bad = FIXTURE.replace("O 1 1 1 3 3 1.5", "O 1 1 1 3 x 1.5");
        let err = parse_house(&bad).unwrap_err();
        assert_eq!(err.line(), Some(12));
        assert!(format!("{}", err).contains("`O`"));
    }

    #[test]
    fn rejects_non_orthogonal_axes() {
        let bad = FIXTURE.replace("3 3 1.5 0 1 0 1 0 0", "3 3 1.5 0 1 0 0.1 0.995 0");
        let err = parse_house(&bad).unwrap_err();
        assert_eq!(err.line(), Some(12));
    }

    #[test]
    fn count_mismatch_and_dangling() {
        let bad = FIXTURE.replace("0 3 2 2 0 1", "0 4 2 2 0 1");
        assert!(matches!(
            parse_house(&bad),
            Err(SceneError::CountMismatch { record: "object", declared: 4, found: 3 })
        ));
        let bad = FIXTURE.replace("O 2 -1 0", "O 2 -1 5");
        assert!(matches!(parse_house(&bad), Err(SceneError::DanglingIndex { .. })));
        let bad = FIXTURE.replace("P vp_d 3 -1", "P vp_d 3 7");
        assert!(matches!(parse_house(&bad), Err(SceneError::DanglingIndex { .. })));
    }

    #[test]
    fn unknown_record_rejected() {
        let bad = format!("{}V 0 0 0\n", FIXTURE);
        assert_eq!(parse_house(&bad).unwrap_err().line(), Some(14));
        assert_eq!(parse_house("O 0\n"), Err(SceneError::MissingHeader));
        assert_eq!(parse_house(""), Err(SceneError::MissingHeader));
    }
}
