//! Bit-packed cell identifiers.
//!
//! Layout of the `u64`, most significant bit first:
//!
//! ```text
//! | face (3) | path digits (2 per level) | 1 | 0 ... 0 |
//! ```
//!
//! The trailing sentinel bit marks the end of the path, so the level is
//! `(60 - trailing_zeros) / 2`. Within one level the numeric order is the
//! lexicographic order of `(face, path)`.

use std::fmt;
use std::str::FromStr;

use super::face::{candidate_faces, uv_to_st, xyz_to_face_uv};
use super::{DggError, LatLng, MAX_LEVEL};

const FACE_SHIFT: u32 = 61;
const PATH_TOP: u32 = 61;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(u64);

impl CellId {
    /// Level-0 cell covering a whole cube face.
    pub fn from_face(face: u8) -> Result<Self, DggError> {
        if face > 5 {
            return Err(DggError::FaceOutOfRange(face));
        }
        Ok(Self::pack(face, 0, 0))
    }

    /// Cell at `level` whose `(i, j)` position on `face` is given in units
    /// of the level's cell width.
    pub fn from_face_ij(face: u8, i: u32, j: u32, level: u8) -> Result<Self, DggError> {
        if face > 5 {
            return Err(DggError::FaceOutOfRange(face));
        }
        check_level(level)?;
        let side = 1u64 << level;
        if u64::from(i) >= side || u64::from(j) >= side {
            return Err(DggError::InvalidCell(format!(
                "({i}, {j}) outside a level-{level} face"
            )));
        }
        let mut path = 0u64;
        for k in (0..level).rev() {
            let digit = ((i >> k) & 1) | (((j >> k) & 1) << 1);
            path = (path << 2) | u64::from(digit);
        }
        Ok(Self::pack(face, level, path))
    }

    pub fn from_path(face: u8, digits: &[u8]) -> Result<Self, DggError> {
        if face > 5 {
            return Err(DggError::FaceOutOfRange(face));
        }
        if digits.len() > MAX_LEVEL as usize {
            return Err(DggError::LevelOutOfRange(digits.len() as i64));
        }
        let mut path = 0u64;
        for &d in digits {
            if d > 3 {
                return Err(DggError::InvalidCell(format!("path digit {d}")));
            }
            path = (path << 2) | u64::from(d);
        }
        Ok(Self::pack(face, digits.len() as u8, path))
    }

    pub fn from_raw(raw: u64) -> Result<Self, DggError> {
        let tz = raw.trailing_zeros();
        if raw == 0 || tz > 60 || !tz.is_multiple_of(2) || (raw >> FACE_SHIFT) > 5 {
            return Err(DggError::InvalidCell(format!("raw id {raw:#018x}")));
        }
        Ok(CellId(raw))
    }

    fn pack(face: u8, level: u8, path: u64) -> Self {
        let level = u32::from(level);
        let sentinel = 1u64 << (PATH_TOP - 1 - 2 * level);
        let path_bits = if level == 0 { 0 } else { path << (PATH_TOP - 2 * level) };
        CellId((u64::from(face) << FACE_SHIFT) | path_bits | sentinel)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn face(self) -> u8 {
        (self.0 >> FACE_SHIFT) as u8
    }

    pub fn level(self) -> u8 {
        ((60 - self.0.trailing_zeros()) / 2) as u8
    }

    /// Path as an integer whose base-4 digits are the quadrant choices.
    fn path(self) -> u64 {
        let level = u32::from(self.level());
        if level == 0 {
            return 0;
        }
        let mask = (1u64 << FACE_SHIFT) - 1;
        (self.0 & mask) >> (PATH_TOP - 2 * level)
    }

    pub fn digits(self) -> Vec<u8> {
        let level = self.level();
        let path = self.path();
        (0..level)
            .map(|k| ((path >> (2 * (level - 1 - k))) & 3) as u8)
            .collect()
    }

    /// Column and row of the cell on its face, in level-cell units.
    pub fn face_ij(self) -> (u32, u32) {
        let (mut i, mut j) = (0u32, 0u32);
        for d in self.digits() {
            i = (i << 1) | u32::from(d & 1);
            j = (j << 1) | u32::from(d >> 1);
        }
        (i, j)
    }

    /// `(s0, t0, s1, t1)` extent of the cell on its face.
    pub fn st_bounds(self) -> (f64, f64, f64, f64) {
        let (i, j) = self.face_ij();
        let side = (1u64 << self.level()) as f64;
        (
            f64::from(i) / side,
            f64::from(j) / side,
            f64::from(i + 1) / side,
            f64::from(j + 1) / side,
        )
    }

    pub fn parent(self) -> Result<Self, DggError> {
        let level = self.level();
        if level == 0 {
            return Err(DggError::NoParent);
        }
        Ok(Self::pack(self.face(), level - 1, self.path() >> 2))
    }

    /// Ancestor at `level`, which must not exceed this cell's level.
    pub fn ancestor(self, level: u8) -> Result<Self, DggError> {
        let own = self.level();
        if level > own {
            return Err(DggError::LevelOutOfRange(i64::from(level)));
        }
        let shift = 2 * u32::from(own - level);
        Ok(Self::pack(self.face(), level, self.path() >> shift))
    }

    pub fn children(self) -> Result<[CellId; 4], DggError> {
        let level = self.level();
        if level >= MAX_LEVEL {
            return Err(DggError::NoChildren);
        }
        let base = self.path() << 2;
        let face = self.face();
        Ok([0, 1, 2, 3].map(|d| Self::pack(face, level + 1, base | d)))
    }

    /// `<face>-<level>-<digits>`, for example `2-3-013`.
    pub fn token(self) -> String {
        let digits: String = self.digits().iter().map(|d| char::from(b'0' + d)).collect();
        format!("{}-{}-{}", self.face(), self.level(), digits)
    }

    pub fn from_token(token: &str) -> Result<Self, DggError> {
        let bad = |why: &str| DggError::MalformedToken {
            token: token.to_string(),
            reason: why.to_string(),
        };
        let mut parts = token.splitn(3, '-');
        let (face, level, digits) = match (parts.next(), parts.next(), parts.next()) {
            (Some(f), Some(l), Some(d)) => (f, l, d),
            _ => return Err(bad("expected <face>-<level>-<digits>")),
        };
        let face: u8 = face.parse().map_err(|_| bad("face is not an integer"))?;
        if face > 5 {
            return Err(bad("face out of range 0..=5"));
        }
        let level: u8 = level.parse().map_err(|_| bad("level is not an integer"))?;
        if level > MAX_LEVEL {
            return Err(bad("level out of range 0..=30"));
        }
        if digits.len() != usize::from(level) {
            return Err(bad("digit count differs from level"));
        }
        let digits = digits
            .bytes()
            .map(|b| match b {
                b'0'..=b'3' => Ok(b - b'0'),
                _ => Err(bad("path digits must be 0-3")),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Self::from_path(face, &digits)
    }

    /// The cell at `level` containing `p`.
    ///
    /// Points on a shared boundary go to the candidate with the smallest id.
    pub fn from_point(p: LatLng, level: u8) -> Result<Self, DggError> {
        check_level(level)?;
        LatLng::new(p.lat, p.lng)?;
        let xyz = p.to_xyz();
        let side = (1u64 << level) as f64;
        // Within a face the smallest id takes the smallest column and row, so
        // ties on an integer grid line resolve downward.
        let index = |st: f64| -> u32 {
            let x = st * side;
            let c = x.ceil();
            let i = if c > 0.0 { c - 1.0 } else { 0.0 };
            (i as u64).min((1u64 << level) - 1) as u32
        };
        candidate_faces(xyz)
            .into_iter()
            .map(|face| {
                let (u, v) = xyz_to_face_uv(face, xyz);
                let (i, j) = (index(uv_to_st(u)), index(uv_to_st(v)));
                Self::from_face_ij(face, i, j, level)
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|cells| cells.into_iter().min().expect("at least one face"))
    }

    /// All `6 * 4^level` cells in id order. Only sensible for small levels.
    pub fn all_at_level(level: u8) -> Result<Vec<CellId>, DggError> {
        check_level(level)?;
        let mut cells: Vec<CellId> = (0..6).map(|f| Self::pack(f, 0, 0)).collect();
        for _ in 0..level {
            cells = cells
                .into_iter()
                .flat_map(|c| c.children().expect("level below max"))
                .collect();
        }
        Ok(cells)
    }
}

pub(crate) fn check_level(level: u8) -> Result<(), DggError> {
    if level > MAX_LEVEL {
        return Err(DggError::LevelOutOfRange(i64::from(level)));
    }
    Ok(())
}

impl fmt::Debug for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellId({})", self.token())
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for CellId {
    type Err = DggError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_token(s)
    }
}
