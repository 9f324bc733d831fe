//! Street-grid world model: blocks, building strips, unit buildings, base
//! station placement and per-location classification.
//!
//! Coordinates are meters with the origin at the top-left corner of the grid.
//! Streets run along the gaps between building strips; every street location
//! is reduced to the nearest point on its street centerline, so propagation
//! only sees the 1-D distance along streets.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid configuration: {0}")]
    Config(String),
    #[error("ISD {isd_m} m is not realizable on this grid: {reason}")]
    Isd { isd_m: f64, reason: String },
    #[error("point ({x}, {y}) is not an outdoor street location")]
    NotStreet { x: f64, y: f64 },
    #[error("point ({x}, {y}) is not an indoor location")]
    NotIndoor { x: f64, y: f64 },
}

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn manhattan(&self, other: &Point) -> f64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn euclidean(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub width_m: f64,
    pub height_m: f64,
    pub block_w_m: f64,
    pub block_h_m: f64,
    pub building_strip_w_m: f64,
    pub building_strip_h_m: f64,
    pub unit_building_w_m: f64,
    pub unit_building_h_m: f64,
    pub ignored_core_w_m: f64,
    pub ignored_core_h_m: f64,
    pub resolution_m: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            width_m: 800.0,
            height_m: 800.0,
            block_w_m: 200.0,
            block_h_m: 50.0,
            building_strip_w_m: 190.0,
            building_strip_h_m: 40.0,
            unit_building_w_m: 19.0,
            unit_building_h_m: 20.0,
            ignored_core_w_m: 150.0,
            ignored_core_h_m: 10.0,
            resolution_m: 1.0,
        }
    }
}

fn is_multiple(value: f64, step: f64) -> bool {
    let q = value / step;
    (q - q.round()).abs() < 1e-9
}

impl GridSpec {
    /// Same layout on a smaller square grid; used for fast runs.
    pub fn reduced(side_m: f64) -> Self {
        Self {
            width_m: side_m,
            height_m: side_m,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let positive = [
            ("width_m", self.width_m),
            ("height_m", self.height_m),
            ("block_w_m", self.block_w_m),
            ("block_h_m", self.block_h_m),
            ("building_strip_w_m", self.building_strip_w_m),
            ("building_strip_h_m", self.building_strip_h_m),
            ("unit_building_w_m", self.unit_building_w_m),
            ("unit_building_h_m", self.unit_building_h_m),
            ("resolution_m", self.resolution_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(GridError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.ignored_core_w_m < 0.0 || self.ignored_core_h_m < 0.0 {
            return Err(GridError::Config("ignored core dimensions must be non-negative".into()));
        }
        if !is_multiple(self.width_m, self.block_w_m) || !is_multiple(self.height_m, self.block_h_m) {
            return Err(GridError::Config(format!(
                "blocks of {} x {} m do not tile a {} x {} m grid",
                self.block_w_m, self.block_h_m, self.width_m, self.height_m
            )));
        }
        if self.building_strip_w_m > self.block_w_m || self.building_strip_h_m > self.block_h_m {
            return Err(GridError::Config("building strip does not fit inside its block".into()));
        }
        if self.ignored_core_w_m > self.building_strip_w_m
            || self.ignored_core_h_m > self.building_strip_h_m
        {
            return Err(GridError::Config("ignored core does not fit inside the building strip".into()));
        }
        if !is_multiple(self.building_strip_w_m, self.unit_building_w_m)
            || !is_multiple(self.building_strip_h_m, self.unit_building_h_m)
        {
            return Err(GridError::Config("unit buildings do not tile the building strip".into()));
        }
        for (name, v) in [
            ("width_m", self.width_m),
            ("height_m", self.height_m),
            ("block_w_m", self.block_w_m),
            ("block_h_m", self.block_h_m),
        ] {
            if !is_multiple(v, self.resolution_m) {
                return Err(GridError::Config(format!("{name} is not a multiple of resolution_m")));
            }
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        (self.width_m / self.resolution_m).round() as usize
    }

    pub fn ny(&self) -> usize {
        (self.height_m / self.resolution_m).round() as usize
    }

    pub fn center(&self) -> Point {
        Point::new(self.width_m / 2.0, self.height_m / 2.0)
    }

    fn margin_x(&self) -> f64 {
        (self.block_w_m - self.building_strip_w_m) / 2.0
    }

    fn margin_y(&self) -> f64 {
        (self.block_h_m - self.building_strip_h_m) / 2.0
    }

    fn blocks_x(&self) -> usize {
        (self.width_m / self.block_w_m).round() as usize
    }

    fn blocks_y(&self) -> usize {
        (self.height_m / self.block_h_m).round() as usize
    }

    fn units_x(&self) -> usize {
        (self.building_strip_w_m / self.unit_building_w_m).round() as usize
    }

    fn units_y(&self) -> usize {
        (self.building_strip_h_m / self.unit_building_h_m).round() as usize
    }

    pub fn is_ns_street(&self, x: f64) -> bool {
        is_multiple(x, self.block_w_m) && x >= -1e-9 && x <= self.width_m + 1e-9
    }

    pub fn is_ew_street(&self, y: f64) -> bool {
        is_multiple(y, self.block_h_m) && y >= -1e-9 && y <= self.height_m + 1e-9
    }

    pub fn is_intersection(&self, p: &Point) -> bool {
        self.is_ns_street(p.x) && self.is_ew_street(p.y)
    }
}

/// Rectangle `[x0, x1] x [y0, y1]` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossClass {
    Low,
    High,
}

impl LossClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossClass::Low => "low",
            LossClass::High => "high",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Building {
    pub id: usize,
    pub strip: usize,
    pub rect: Rect,
    pub loss_class: LossClass,
}

/// Exterior face of a building strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    West,
    East,
    North,
    South,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::West, Face::East, Face::North, Face::South];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallExit {
    pub face: Face,
    /// Perpendicular distance from the location to the face.
    pub distance_m: f64,
    /// Street centerline point reached by leaving perpendicular through the face.
    pub street_point: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndoorInfo {
    pub building_id: usize,
    pub walls: [WallExit; 4],
}

impl IndoorInfo {
    pub fn wall(&self, face: Face) -> &WallExit {
        self.walls.iter().find(|w| w.face == face).expect("all four faces present")
    }

    /// Shortest distance to any exterior wall.
    pub fn depth_m(&self) -> f64 {
        self.walls.iter().map(|w| w.distance_m).fold(f64::INFINITY, f64::min)
    }
}

/// Geometry-only cell kind, independent of base station placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    /// Street location, carrying its projection onto the street centerline.
    Street(Point),
    Indoor(IndoorInfo),
    IgnoredCore { building_id: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocationClass {
    OutdoorLosStreet(Vec<usize>),
    OutdoorNlosStreet,
    Indoor(IndoorInfo),
    IgnoredCore,
}

impl LocationClass {
    pub fn label(&self) -> &'static str {
        match self {
            LocationClass::OutdoorLosStreet(_) => "street_los",
            LocationClass::OutdoorNlosStreet => "street_nlos",
            LocationClass::Indoor(_) => "indoor",
            LocationClass::IgnoredCore => "ignored",
        }
    }
}

/// Immutable street-grid world.
#[derive(Debug, Clone)]
pub struct World {
    spec: GridSpec,
    strips: Vec<Rect>,
    buildings: Vec<Building>,
}

pub fn build_grid(spec: GridSpec) -> Result<World, GridError> {
    spec.validate()?;
    let (mx, my) = (spec.margin_x(), spec.margin_y());
    let mut strips = Vec::with_capacity(spec.blocks_x() * spec.blocks_y());
    let mut buildings = Vec::new();
    for by in 0..spec.blocks_y() {
        for bx in 0..spec.blocks_x() {
            let x0 = bx as f64 * spec.block_w_m + mx;
            let y0 = by as f64 * spec.block_h_m + my;
            let strip = Rect {
                x0,
                y0,
                x1: x0 + spec.building_strip_w_m,
                y1: y0 + spec.building_strip_h_m,
            };
            let strip_id = strips.len();
            strips.push(strip);
            for uy in 0..spec.units_y() {
                for ux in 0..spec.units_x() {
                    let ux0 = x0 + ux as f64 * spec.unit_building_w_m;
                    let uy0 = y0 + uy as f64 * spec.unit_building_h_m;
                    buildings.push(Building {
                        id: buildings.len(),
                        strip: strip_id,
                        rect: Rect {
                            x0: ux0,
                            y0: uy0,
                            x1: ux0 + spec.unit_building_w_m,
                            y1: uy0 + spec.unit_building_h_m,
                        },
                        loss_class: LossClass::Low,
                    });
                }
            }
        }
    }
    Ok(World { spec, strips, buildings })
}

impl World {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn strips(&self) -> &[Rect] {
        &self.strips
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    /// Lattice point for index `(i, j)`.
    pub fn lattice_point(&self, i: usize, j: usize) -> Point {
        Point::new(i as f64 * self.spec.resolution_m, j as f64 * self.spec.resolution_m)
    }

    /// Iterates all lattice points row by row.
    pub fn lattice(&self) -> impl Iterator<Item = Point> + '_ {
        let (nx, ny) = (self.spec.nx(), self.spec.ny());
        (0..ny).flat_map(move |j| (0..nx).map(move |i| self.lattice_point(i, j)))
    }

    fn block_of(&self, p: &Point) -> (usize, usize) {
        let s = &self.spec;
        let bx = ((p.x / s.block_w_m).floor() as isize).clamp(0, s.blocks_x() as isize - 1);
        let by = ((p.y / s.block_h_m).floor() as isize).clamp(0, s.blocks_y() as isize - 1);
        (bx as usize, by as usize)
    }

    /// Classifies a point by geometry alone.
    pub fn cell(&self, p: &Point) -> Cell {
        let s = &self.spec;
        match self.strip_geometry(p) {
            Some(info) => {
                let strip = self.strips[self.buildings[info.building_id].strip];
                let cx = (strip.x0 + strip.x1) / 2.0;
                let cy = (strip.y0 + strip.y1) / 2.0;
                if (p.x - cx).abs() <= s.ignored_core_w_m / 2.0 && (p.y - cy).abs() <= s.ignored_core_h_m / 2.0 {
                    Cell::IgnoredCore { building_id: info.building_id }
                } else {
                    Cell::Indoor(info)
                }
            }
            None => {
                let (bx, by) = self.block_of(p);
                let strip = self.strips[by * s.blocks_x() + bx];
                Cell::Street(self.street_projection(p, bx, by, &strip))
            }
        }
    }

    /// Building and wall geometry for any point inside a building strip,
    /// including the ignored core.
    pub fn strip_geometry(&self, p: &Point) -> Option<IndoorInfo> {
        let s = &self.spec;
        let (bx, by) = self.block_of(p);
        let strip_id = by * s.blocks_x() + bx;
        let strip = self.strips[strip_id];
        if !strip.contains(p) {
            return None;
        }
        let building_id = self.building_index(strip_id, &strip, p);
        let block_x0 = bx as f64 * s.block_w_m;
        let block_y0 = by as f64 * s.block_h_m;
        let walls = [
            WallExit {
                face: Face::West,
                distance_m: p.x - strip.x0,
                street_point: Point::new(block_x0, p.y),
            },
            WallExit {
                face: Face::East,
                distance_m: strip.x1 - p.x,
                street_point: Point::new(block_x0 + s.block_w_m, p.y),
            },
            WallExit {
                face: Face::North,
                distance_m: p.y - strip.y0,
                street_point: Point::new(p.x, block_y0),
            },
            WallExit {
                face: Face::South,
                distance_m: strip.y1 - p.y,
                street_point: Point::new(p.x, block_y0 + s.block_h_m),
            },
        ];
        Some(IndoorInfo { building_id, walls })
    }

    fn building_index(&self, strip_id: usize, strip: &Rect, p: &Point) -> usize {
        let s = &self.spec;
        let ux = (((p.x - strip.x0) / s.unit_building_w_m).floor() as usize).min(s.units_x() - 1);
        let uy = (((p.y - strip.y0) / s.unit_building_h_m).floor() as usize).min(s.units_y() - 1);
        strip_id * s.units_x() * s.units_y() + uy * s.units_x() + ux
    }

    fn street_projection(&self, p: &Point, bx: usize, by: usize, strip: &Rect) -> Point {
        let s = &self.spec;
        let in_ns = p.x < strip.x0 || p.x > strip.x1;
        let in_ew = p.y < strip.y0 || p.y > strip.y1;
        let snap_x = |x: f64| {
            let left = bx as f64 * s.block_w_m;
            if x - left < s.block_w_m / 2.0 { left } else { left + s.block_w_m }
        };
        let snap_y = |y: f64| {
            let top = by as f64 * s.block_h_m;
            if y - top < s.block_h_m / 2.0 { top } else { top + s.block_h_m }
        };
        Point::new(
            if in_ns { snap_x(p.x) } else { p.x },
            if in_ew { snap_y(p.y) } else { p.y },
        )
    }

    /// Street centerline projection of an outdoor point.
    pub fn street_point(&self, p: &Point) -> Result<Point, GridError> {
        match self.cell(p) {
            Cell::Street(sp) => Ok(sp),
            _ => Err(GridError::NotStreet { x: p.x, y: p.y }),
        }
    }

    pub fn indoor_info(&self, p: &Point) -> Result<IndoorInfo, GridError> {
        match self.cell(p) {
            Cell::Indoor(info) => Ok(info),
            _ => Err(GridError::NotIndoor { x: p.x, y: p.y }),
        }
    }

    /// Classifies a point with respect to a base station layout.
    pub fn classify(&self, p: &Point, sites: &SiteLayout) -> LocationClass {
        match self.cell(p) {
            Cell::Street(sp) => {
                let los: Vec<usize> = sites
                    .bs_positions
                    .iter()
                    .enumerate()
                    .filter(|(_, bs)| matches!(manhattan_route_on(&self.spec, bs, &sp), Route::SameStreet { .. }))
                    .map(|(id, _)| id)
                    .collect();
                if los.is_empty() {
                    LocationClass::OutdoorNlosStreet
                } else {
                    LocationClass::OutdoorLosStreet(los)
                }
            }
            Cell::Indoor(info) => LocationClass::Indoor(info),
            Cell::IgnoredCore { .. } => LocationClass::IgnoredCore,
        }
    }

    /// Street route from a base station to an outdoor point.
    pub fn manhattan_route(&self, bs: &Point, p: &Point) -> Result<Route, GridError> {
        let sp = self.street_point(p)?;
        Ok(manhattan_route_on(&self.spec, bs, &sp))
    }

    pub fn with_building_classes(mut self, classes: &[LossClass]) -> Self {
        for (b, c) in self.buildings.iter_mut().zip(classes) {
            b.loss_class = *c;
        }
        self
    }
}

/// Street route between a base station and a street centerline point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Route {
    SameStreet { d_m: f64 },
    OneTurn { d_c_m: f64, x_m: f64 },
    NoStreetRoute,
}

/// Routes on centerline coordinates. Among one-turn candidates the one with the
/// smallest `d_c * (x - d_c) * x` product wins, which is the strongest under
/// the around-the-corner law for any positive exponent.
pub fn manhattan_route_on(spec: &GridSpec, bs: &Point, sp: &Point) -> Route {
    let bs_ns = spec.is_ns_street(bs.x);
    let bs_ew = spec.is_ew_street(bs.y);
    let eps = 1e-9;
    if (bs_ns && (sp.x - bs.x).abs() < eps) || (bs_ew && (sp.y - bs.y).abs() < eps) {
        return Route::SameStreet { d_m: bs.manhattan(sp) };
    }
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |d_c: f64, leg: f64| {
        let x = d_c + leg;
        let product = d_c.max(1.0) * leg.max(1.0) * x;
        if best.is_none_or(|(p, _, _)| product < p) {
            best = Some((product, d_c, x));
        }
    };
    // Along the BS's N-S street, then along the point's E-W street.
    if bs_ns && spec.is_ew_street(sp.y) {
        consider((sp.y - bs.y).abs(), (sp.x - bs.x).abs());
    }
    // Along the BS's E-W street, then along the point's N-S street.
    if bs_ew && spec.is_ns_street(sp.x) {
        consider((sp.x - bs.x).abs(), (sp.y - bs.y).abs());
    }
    match best {
        Some((_, d_c_m, x_m)) => Route::OneTurn { d_c_m, x_m },
        None => Route::NoStreetRoute,
    }
}

/// Manhattan-ball membership, boundary inclusive.
pub fn in_diamond(p: &Point, center: &Point, radius_m: f64) -> bool {
    p.manhattan(center) <= radius_m
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteLayout {
    pub bs_positions: Vec<Point>,
    pub isd_m: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    /// Index of the base station at the grid center.
    pub center_bs: usize,
}

/// Places base stations on the rotated square lattice of intersections whose
/// nearest neighbours are `isd_m` apart in Manhattan distance, anchored at the
/// grid center.
pub fn place_base_stations(
    spec: &GridSpec,
    isd_m: f64,
    bs_height_m: f64,
    ue_height_m: f64,
) -> Result<SiteLayout, GridError> {
    spec.validate()?;
    if !(isd_m > 0.0) {
        return Err(GridError::Isd { isd_m, reason: "must be positive".into() });
    }
    let half = isd_m / 2.0;
    if !is_multiple(half, spec.block_w_m) || !is_multiple(half, spec.block_h_m) {
        return Err(GridError::Isd {
            isd_m,
            reason: format!(
                "half the ISD must be a multiple of both street spacings ({} m and {} m)",
                spec.block_w_m, spec.block_h_m
            ),
        });
    }
    let center = spec.center();
    if !spec.is_intersection(&center) {
        return Err(GridError::Config("grid center is not a street intersection".into()));
    }
    let kx = (center.x / half).floor() as i64;
    let ky = (center.y / half).floor() as i64;
    let mut bs_positions = Vec::new();
    let mut center_bs = 0;
    for j in -ky..=((spec.height_m - center.y) / half).floor() as i64 {
        for i in -kx..=((spec.width_m - center.x) / half).floor() as i64 {
            if (i + j).rem_euclid(2) != 0 {
                continue;
            }
            if i == 0 && j == 0 {
                center_bs = bs_positions.len();
            }
            bs_positions.push(Point::new(center.x + i as f64 * half, center.y + j as f64 * half));
        }
    }
    Ok(SiteLayout { bs_positions, isd_m, bs_height_m, ue_height_m, center_bs })
}

impl SiteLayout {
    pub fn center(&self) -> Point {
        self.bs_positions[self.center_bs]
    }

    /// Statistics region radius: half the ISD, so regions of neighbouring
    /// sites touch without overlapping.
    pub fn diamond_radius_m(&self) -> f64 {
        self.isd_m / 2.0
    }
}

/// Draws an independent loss class for each building.
pub fn assign_building_classes<R: Rng + ?Sized>(n_buildings: usize, p_high: f64, rng: &mut R) -> Vec<LossClass> {
    (0..n_buildings)
        .map(|_| {
            if rng.random::<f64>() < p_high {
                LossClass::High
            } else {
                LossClass::Low
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world() -> World {
        build_grid(GridSpec::default()).unwrap()
    }

    fn sites() -> SiteLayout {
        place_base_stations(&GridSpec::default(), 400.0, 22.0, 1.5).unwrap()
    }

    #[test]
    fn default_counts() {
        let w = world();
        assert_eq!(w.strips().len(), 4 * 16);
        assert_eq!(w.buildings().len(), 64 * 20);
    }

    #[test]
    fn street_between_blocks() {
        let w = world();
        for x in [10.0, 100.0, 450.0, 790.0] {
            assert!(matches!(w.cell(&Point::new(x, 400.0)), Cell::Street(_)), "x={x}");
        }
        assert_eq!(w.street_point(&Point::new(450.0, 403.0)).unwrap(), Point::new(450.0, 400.0));
        assert_eq!(w.street_point(&Point::new(597.0, 420.0)).unwrap(), Point::new(600.0, 420.0));
    }

    #[test]
    fn ignored_core_is_ignored() {
        let w = world();
        // Block (2, 8): strip x 405..595, y 405..445, center (500, 425).
        for x in 425..=575 {
            for y in 420..=430 {
                let p = Point::new(x as f64, y as f64);
                assert!(matches!(w.cell(&p), Cell::IgnoredCore { .. }), "{p:?}");
            }
        }
        assert!(matches!(w.cell(&Point::new(424.0, 425.0)), Cell::Indoor(_)));
        assert!(matches!(w.cell(&Point::new(500.0, 419.0)), Cell::Indoor(_)));
    }

    #[test]
    fn strip_corner_wall_distances() {
        let w = world();
        // Strip corner of block (2, 8) at (405, 405); a point 1 m in from both faces.
        let info = w.indoor_info(&Point::new(406.0, 406.0)).unwrap();
        assert_eq!(info.wall(Face::West).distance_m, 1.0);
        assert_eq!(info.wall(Face::East).distance_m, 189.0);
        assert_eq!(info.wall(Face::North).distance_m, 1.0);
        assert_eq!(info.wall(Face::South).distance_m, 39.0);
        assert_eq!(info.wall(Face::West).street_point, Point::new(400.0, 406.0));
        assert_eq!(info.wall(Face::South).street_point, Point::new(406.0, 450.0));
        assert!(info.walls.iter().all(|wall| wall.distance_m.is_finite()));
    }

    #[test]
    fn worked_points_classify() {
        let w = world();
        let s = sites();
        assert_eq!(w.classify(&Point::new(450.0, 450.0), &s), LocationClass::OutdoorNlosStreet);
        let a = w.indoor_info(&Point::new(490.0, 490.0)).unwrap();
        assert_eq!(a.wall(Face::South).distance_m, 5.0);
        assert_eq!(a.wall(Face::South).street_point, Point::new(490.0, 500.0));
        let p = w.indoor_info(&Point::new(450.0, 440.0)).unwrap();
        assert_eq!(p.wall(Face::South).street_point, Point::new(450.0, 450.0));
        assert!(matches!(w.classify(&Point::new(400.0, 480.0), &s), LocationClass::OutdoorLosStreet(ids) if ids.contains(&s.center_bs)));
    }

    #[test]
    fn bs_layout_isd_400() {
        let s = sites();
        assert_eq!(s.bs_positions.len(), 13);
        assert_eq!(s.center(), Point::new(400.0, 400.0));
        let spec = GridSpec::default();
        assert!(s.bs_positions.iter().all(|p| spec.is_intersection(p)));
        for a in &s.bs_positions {
            let nearest = s
                .bs_positions
                .iter()
                .filter(|b| *b != a)
                .map(|b| a.manhattan(b))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(nearest, 400.0);
        }
        for a in &s.bs_positions {
            for b in &s.bs_positions {
                if a != b && (a.x == b.x || a.y == b.y) {
                    assert_eq!(((a.x - b.x).abs() + (a.y - b.y).abs()) % 400.0, 0.0);
                }
            }
        }
        // Rotated lattice: two sites per isd^2 cell -> 12.5 per km^2.
        let density = 2.0 / (0.4f64 * 0.4);
        assert!((density - 12.0).abs() < 1.0);
    }

    #[test]
    fn bs_layout_isd_800_and_errors() {
        let spec = GridSpec::default();
        let s = place_base_stations(&spec, 800.0, 22.0, 1.5).unwrap();
        assert_eq!(s.bs_positions.len(), 5);
        assert!(matches!(place_base_stations(&spec, 300.0, 22.0, 1.5), Err(GridError::Isd { .. })));
        assert!(matches!(place_base_stations(&spec, 100.0, 22.0, 1.5), Err(GridError::Isd { .. })));
    }

    #[test]
    fn tiling_error() {
        let spec = GridSpec { width_m: 750.0, ..GridSpec::default() };
        assert!(matches!(build_grid(spec), Err(GridError::Config(_))));
        let spec = GridSpec { building_strip_w_m: 210.0, ..GridSpec::default() };
        assert!(build_grid(spec).is_err());
    }

    #[test]
    fn routes() {
        let w = world();
        let bs = Point::new(400.0, 400.0);
        assert_eq!(w.manhattan_route(&bs, &Point::new(400.0, 500.0)).unwrap(), Route::SameStreet { d_m: 100.0 });
        assert_eq!(
            w.manhattan_route(&bs, &Point::new(490.0, 500.0)).unwrap(),
            Route::OneTurn { d_c_m: 100.0, x_m: 190.0 }
        );
        assert!(matches!(w.manhattan_route(&bs, &Point::new(490.0, 490.0)), Err(GridError::NotStreet { .. })));
        // A transmitter mid-block on a N-S street has no E-W street of its own,
        // so a parallel N-S street needs two turns.
        let mid = Point::new(400.0, 425.0);
        assert_eq!(w.manhattan_route(&mid, &Point::new(600.0, 475.0)).unwrap(), Route::NoStreetRoute);
    }

    #[test]
    fn route_picks_weaker_product_at_intersections() {
        let spec = GridSpec::default();
        // (600, 450) reachable via (400, 450) [d_c=50, x=250] or (600, 400) [d_c=200, x=250].
        let r = manhattan_route_on(&spec, &Point::new(400.0, 400.0), &Point::new(600.0, 450.0));
        assert_eq!(r, Route::OneTurn { d_c_m: 50.0, x_m: 250.0 });
    }

    #[test]
    fn diamond() {
        let c = Point::new(400.0, 400.0);
        assert!(in_diamond(&Point::new(490.0, 490.0), &c, 200.0));
        assert!(in_diamond(&Point::new(400.0, 600.0), &c, 200.0));
        assert!(!in_diamond(&Point::new(601.0, 400.0), &c, 200.0));
    }

    #[test]
    fn building_class_extremes_and_fraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(assign_building_classes(500, 0.0, &mut rng).iter().all(|c| *c == LossClass::Low));
        assert!(assign_building_classes(500, 1.0, &mut rng).iter().all(|c| *c == LossClass::High));
        let n = 20_000;
        let high = assign_building_classes(n, 0.2, &mut rng).iter().filter(|c| **c == LossClass::High).count();
        let sd = (n as f64 * 0.2 * 0.8).sqrt();
        assert!((high as f64 - 0.2 * n as f64).abs() < 3.0 * sd);
        let a = assign_building_classes(100, 0.3, &mut ChaCha8Rng::seed_from_u64(1));
        let b = assign_building_classes(100, 0.3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
