//! Site geometry: AP, cuboid buildings, UEs and candidate IRS spots.
//!
//! All coordinates are meters in a right-handed frame with the AP on the
//! Z-axis and the ground at `z = 0`. Angles at the public surface are degrees.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Start-point offset applied along a facet normal so that an IRS never
/// blocks its own link through the wall it is mounted on.
pub const FACET_OFFSET: f64 = 1e-6;

/// Minimum positive length (m) of a segment/box overlap counted as blockage.
const BLOCK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_2d(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned cuboid standing on the ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub min: Point3,
    pub max: Point3,
}

impl Building {
    pub fn new(min: Point3, max: Point3) -> Result<Self> {
        let b = Self { min, max };
        b.validate()?;
        Ok(b)
    }

    /// Footprint `[x0, x1] x [y0, y1]` with the given roof height.
    pub fn from_footprint(x0: f64, x1: f64, y0: f64, y1: f64, height: f64) -> Result<Self> {
        Self::new(Point3::new(x0, y0, 0.0), Point3::new(x1, y1, height))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::geometry("building corners must be finite"));
        }
        if !(self.min.x < self.max.x && self.min.y < self.max.y && self.min.z < self.max.z) {
            return Err(Error::geometry("building min corner must be below max corner"));
        }
        if self.min.z != 0.0 {
            return Err(Error::geometry("building base must be at z = 0"));
        }
        Ok(())
    }

    pub fn height(&self) -> f64 {
        self.max.z - self.min.z
    }

    /// Strict interior containment.
    pub fn contains_interior(&self, p: Point3) -> bool {
        (0..3).all(|i| self.min.axis(i) < p.axis(i) && p.axis(i) < self.max.axis(i))
    }

    /// Footprint containment, boundary inclusive, ignoring height.
    pub fn covers_xy(&self, x: f64, y: f64) -> bool {
        self.min.x <= x && x <= self.max.x && self.min.y <= y && y <= self.max.y
    }

    /// Length of the part of segment `a -> b` strictly inside the box.
    ///
    /// Slab method against the open box: an axis with zero direction keeps the
    /// segment only if the coordinate lies strictly between the slab planes,
    /// so segments running in a face plane or touching an edge overlap nothing.
    pub fn overlap_length(&self, a: Point3, b: Point3) -> f64 {
        let d = b - a;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for i in 0..3 {
            let (o, di) = (a.axis(i), d.axis(i));
            let (lo, hi) = (self.min.axis(i), self.max.axis(i));
            if di == 0.0 {
                if !(lo < o && o < hi) {
                    return 0.0;
                }
                continue;
            }
            let inv = 1.0 / di;
            let (mut ta, mut tb) = ((lo - o) * inv, (hi - o) * inv);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t1 <= t0 {
                return 0.0;
            }
        }
        (t1 - t0) * d.norm()
    }
}

/// Ground rectangle of the target area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Area {
    /// Rectangle of the given size centered on the origin (the AP foot).
    pub fn centered(width_x: f64, width_y: f64) -> Self {
        Self {
            x_min: -width_x / 2.0,
            x_max: width_x / 2.0,
            y_min: -width_y / 2.0,
            y_max: width_y / 2.0,
        }
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        self.x_min <= x && x <= self.x_max && self.y_min <= y && y <= self.y_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub ap_position: Point3,
    /// Electrical down-tilt of the AP main beam, degrees below the horizon.
    pub ap_tilt_deg: f64,
    pub buildings: Vec<Building>,
    pub ues: Vec<Point3>,
    pub area: Area,
}

impl Scene {
    pub fn new(
        ap_position: Point3,
        ap_tilt_deg: f64,
        buildings: Vec<Building>,
        ues: Vec<Point3>,
        area: Area,
    ) -> Result<Self> {
        let s = Self {
            ap_position,
            ap_tilt_deg,
            buildings,
            ues,
            area,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.ap_position.is_finite() || !self.ap_tilt_deg.is_finite() {
            return Err(Error::geometry("AP pose must be finite"));
        }
        for (i, b) in self.buildings.iter().enumerate() {
            b.validate()
                .map_err(|e| Error::geometry(format!("building {i}: {e}")))?;
        }
        for (u, p) in self.ues.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::geometry(format!("UE {u} has non-finite position")));
            }
            if !self.area.contains_xy(p.x, p.y) {
                return Err(Error::geometry(format!("UE {u} lies outside the target area")));
            }
            if p.z >= self.ap_position.z {
                return Err(Error::geometry(format!("UE {u} is not below the AP")));
            }
            if self.buildings.iter().any(|b| b.contains_interior(*p)) {
                return Err(Error::geometry(format!("UE {u} lies inside a building")));
            }
        }
        Ok(())
    }

    /// See [`los_clear`].
    pub fn los_clear(&self, a: Point3, b: Point3) -> bool {
        los_clear(a, b, &self.buildings)
    }
}

/// True iff the open segment `(a, b)` crosses no building interior.
///
/// Endpoints are visited in a canonical order so the result is exactly
/// symmetric in `a` and `b`. Grazing contact (zero-length overlap) is clear.
pub fn los_clear(a: Point3, b: Point3, buildings: &[Building]) -> bool {
    let key = |p: Point3| [p.x, p.y, p.z];
    let (a, b) = if key(a).partial_cmp(&key(b)) == Some(std::cmp::Ordering::Greater) {
        (b, a)
    } else {
        (a, b)
    };
    buildings.iter().all(|bl| bl.overlap_length(a, b) <= BLOCK_EPS)
}

/// Line-of-sight test from an IRS spot, starting just off its hosting wall.
pub fn los_clear_from_spot(spot: &CandidateSpot, target: Point3, buildings: &[Building]) -> bool {
    los_clear(spot.position + spot.facet_normal * FACET_OFFSET, target, buildings)
}

/// How a link endpoint is mounted, which fixes its local angular frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mount {
    /// No preferred direction; angles are not reported.
    Isotropic,
    /// Vertical array with a down-tilted beam (the AP).
    Downtilt { tilt_deg: f64 },
    /// Planar surface with an outward unit normal (an IRS).
    Facet { normal: Point3 },
}

/// Direction of a link seen from one endpoint's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDirection {
    /// Facet mounts: polar angle from the normal. Downtilt mounts: elevation
    /// below the horizon (positive downward), in `(-90, 90]`.
    pub theta_deg: f64,
    /// Facet mounts: azimuth in the facet plane from the horizontal axis.
    /// Downtilt mounts: ground-plane bearing.
    pub phi_deg: f64,
    /// Angle away from the mount's main direction: the polar angle for a
    /// facet, `theta - tilt` for a down-tilted array.
    pub off_axis_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance: f64,
    pub distance_2d: f64,
    /// Unit vector from `a` to `b`.
    pub direction: Point3,
    pub departure: Option<LocalDirection>,
    pub arrival: Option<LocalDirection>,
}

/// Local frame of a facet: `(x', y', z')` with `z'` the normal, `x'`
/// horizontal along the face and `y' = z' x x'`.
pub fn facet_frame(normal: Point3) -> (Point3, Point3, Point3) {
    let z = normal.normalized();
    let up = Point3::new(0.0, 0.0, 1.0);
    let mut x = up.cross(z);
    if x.norm() < 1e-12 {
        // Horizontal facet; any horizontal axis will do.
        x = Point3::new(1.0, 0.0, 0.0);
    }
    let x = x.normalized();
    let y = z.cross(x);
    (x, y, z)
}

fn local_direction(mount: Mount, dir: Point3) -> Option<LocalDirection> {
    match mount {
        Mount::Isotropic => None,
        Mount::Downtilt { tilt_deg } => {
            let theta = (-dir.z).atan2(dir.norm_2d()).to_degrees();
            // atan2 yields -90 for straight up; the pattern domain is (-90, 90].
            let theta = if theta <= -90.0 { 90.0 } else { theta };
            Some(LocalDirection {
                theta_deg: theta,
                phi_deg: dir.y.atan2(dir.x).to_degrees(),
                off_axis_deg: theta - tilt_deg,
            })
        }
        Mount::Facet { normal } => {
            let (xa, ya, za) = facet_frame(normal);
            let cos_t = dir.dot(za).clamp(-1.0, 1.0);
            let theta = cos_t.acos().to_degrees();
            Some(LocalDirection {
                theta_deg: theta,
                phi_deg: dir.dot(ya).atan2(dir.dot(xa)).to_degrees(),
                off_axis_deg: theta,
            })
        }
    }
}

/// Distances and local departure/arrival angles of the link `a -> b`.
pub fn link_geometry(a: Point3, b: Point3, tx: Mount, rx: Mount) -> Result<LinkGeometry> {
    let v = b - a;
    let distance = v.norm();
    if !(distance > 0.0) {
        return Err(Error::geometry("zero-length link"));
    }
    let direction = v * (1.0 / distance);
    Ok(LinkGeometry {
        distance,
        distance_2d: v.norm_2d(),
        direction,
        departure: local_direction(tx, direction),
        arrival: local_direction(rx, -direction),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpot {
    pub id: usize,
    pub position: Point3,
    pub facet_normal: Point3,
    pub host_building: usize,
    pub face: usize,
    pub cell_width: f64,
    pub cell_height: f64,
}

/// The four vertical faces of a building in a fixed order:
/// `-x`, `+x`, `-y`, `+y`. Returns (fixed coordinate point, along-face unit
/// vector, outward normal, face width).
fn vertical_faces(b: &Building) -> [(Point3, Point3, Point3, f64); 4] {
    let wx = b.max.x - b.min.x;
    let wy = b.max.y - b.min.y;
    [
        (
            Point3::new(b.min.x, b.min.y, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(-1.0, 0.0, 0.0),
            wy,
        ),
        (
            Point3::new(b.max.x, b.min.y, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            wy,
        ),
        (
            Point3::new(b.min.x, b.min.y, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, -1.0, 0.0),
            wx,
        ),
        (
            Point3::new(b.min.x, b.max.y, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            wx,
        ),
    ]
}

/// Tiles every vertical face above `min_mount_height` with whole
/// `grid_w x grid_h` cells and returns one spot per cell center.
///
/// Columns are centered on the face; rows start at `min_mount_height`.
/// Order: building, face (`-x, +x, -y, +y`), row (bottom up), column.
pub fn generate_candidate_spots(
    scene: &Scene,
    grid_w: f64,
    grid_h: f64,
    min_mount_height: f64,
) -> Result<Vec<CandidateSpot>> {
    if !(grid_w > 0.0 && grid_h > 0.0) {
        return Err(Error::geometry("grid cell dimensions must be positive"));
    }
    if !(min_mount_height >= 0.0) {
        return Err(Error::geometry("minimum mounting height must be nonnegative"));
    }
    let mut spots = Vec::new();
    for (bi, b) in scene.buildings.iter().enumerate() {
        let usable = b.max.z - min_mount_height;
        if usable <= 0.0 {
            continue;
        }
        let rows = (usable / grid_h).floor() as usize;
        for (fi, (origin, along, normal, width)) in vertical_faces(b).into_iter().enumerate() {
            let cols = (width / grid_w).floor() as usize;
            let margin = (width - cols as f64 * grid_w) / 2.0;
            for r in 0..rows {
                let z = min_mount_height + (r as f64 + 0.5) * grid_h;
                for c in 0..cols {
                    let s = margin + (c as f64 + 0.5) * grid_w;
                    let mut position = origin + along * s;
                    position.z = z;
                    spots.push(CandidateSpot {
                        id: spots.len(),
                        position,
                        facet_normal: normal,
                        host_building: bi,
                        face: fi,
                        cell_width: grid_w,
                        cell_height: grid_h,
                    });
                }
            }
        }
    }
    Ok(spots)
}

/// Keeps spots that face the AP and see it in LoS; ids are re-indexed.
pub fn filter_candidates_by_ap_los(spots: &[CandidateSpot], scene: &Scene) -> Vec<CandidateSpot> {
    spots
        .iter()
        .filter(|s| {
            s.facet_normal.dot(scene.ap_position - s.position) > 0.0
                && los_clear_from_spot(s, scene.ap_position, &scene.buildings)
        })
        .enumerate()
        .map(|(id, s)| CandidateSpot { id, ..*s })
        .collect()
}
