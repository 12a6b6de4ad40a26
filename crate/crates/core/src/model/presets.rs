//! Named model presets and their geometry and loading.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundaryFace, FlowNetwork, Fracture, FractureAssembly, Physics, PhysicsCouplings, SparseSymmetric, Well};
use crate::contact::ContactParameters;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaling::characteristic_scales;
use crate::solution::Layout;

pub const PRESET_NAMES: [&str; 6] = ["single-pm", "single-tpm", "multi4-pm", "multi4-tpm", "multi8-pm", "multi8-tpm"];

/// Background displacement driving the loading, m. Sets `σ₀ = E U / L`.
const BOUNDARY_DISPLACEMENT: f64 = 0.01;
const DOMAIN_LENGTH: f64 = 1.0;
/// Nonlocal interaction length of the influence operator, m.
const INTERACTION_LENGTH: f64 = 0.1;
/// Diagonal part of the influence operator relative to `E / L`.
const LOCAL_STIFFNESS: f64 = 1.0;
/// Off-diagonal coupling between consecutively generated fractures, relative to `E / L`.
const FRACTURE_COUPLING: f64 = 0.05;
const INLET_PRESSURE: f64 = 7.5e3;
const OUTLET_PRESSURE: f64 = -5.0e3;
const INJECTION_PRESSURE: f64 = 6.0e4;
const PRODUCTION_PRESSURE: f64 = -2.0e4;
const INLET_TEMPERATURE: f64 = -2.0;
const OUTLET_TEMPERATURE: f64 = 0.0;
const REGIME_INIT: f64 = -0.1;
/// Cells per side of every multi-fracture patch.
pub const MULTI_CELLS_PER_SIDE: usize = 5;
const MULTI_FRACTURE_SIZE: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetKind {
    Single,
    Multi(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub physics: Physics,
}

impl Preset {
    /// `cells_per_side` only applies to the single-fracture presets and `seed` only to the
    /// multi-fracture ones.
    pub fn build<T: Real>(&self, cells_per_side: usize, phi: T, u_c: T, seed: u64) -> Result<FractureAssembly<T>> {
        match self.kind {
            PresetKind::Single => make_single_fracture(cells_per_side, phi, u_c, self.physics),
            PresetKind::Multi(n) => make_multi_fracture(n, seed, phi, u_c, self.physics),
        }
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let (kind, physics) = match name {
        "single-pm" => (PresetKind::Single, Physics::Poro),
        "single-tpm" => (PresetKind::Single, Physics::ThermoPoro),
        "multi4-pm" => (PresetKind::Multi(4), Physics::Poro),
        "multi4-tpm" => (PresetKind::Multi(4), Physics::ThermoPoro),
        "multi8-pm" => (PresetKind::Multi(8), Physics::Poro),
        "multi8-tpm" => (PresetKind::Multi(8), Physics::ThermoPoro),
        _ => {
            return Err(Error::Config(format!(
                "unknown model preset `{name}` (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let name = PRESET_NAMES.iter().find(|&&n| n == name).expect("matched above");
    Ok(Preset { name, kind, physics })
}

/// Background traction on the single fracture in units of `σ₀`: the normal component varies
/// linearly along the first tangent, the shear is uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleFractureLoading {
    /// Normal traction at the fracture centre (negative is compressive).
    pub normal_mean: f64,
    /// Change of the normal traction across the fracture.
    pub normal_ramp: f64,
    pub shear: f64,
    /// Direction of the shear in the fracture plane, radians from the first tangent.
    pub shear_angle: f64,
}

impl Default for SingleFractureLoading {
    fn default() -> Self {
        Self { normal_mean: -0.5, normal_ramp: -2.0, shear: 0.7, shear_angle: 0.3 }
    }
}

struct Grid {
    m: usize,
    n: usize,
}

impl Grid {
    fn index(&self, i: usize, j: usize) -> usize {
        i + self.m * j
    }

    fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Interior faces, each once.
    fn faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..self.m {
                if i + 1 < self.m {
                    out.push((self.index(i, j), self.index(i + 1, j)));
                }
                if j + 1 < self.n {
                    out.push((self.index(i, j), self.index(i, j + 1)));
                }
            }
        }
        out
    }

    /// Graph Laplacian with zero jumps imposed half a cell beyond the fracture edge.
    fn laplacian(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.cells()];
        for j in 0..self.n {
            for i in 0..self.m {
                let me = self.index(i, j);
                let mut diag = 0.0;
                let neighbours = [
                    (i > 0).then(|| self.index(i - 1, j)),
                    (i + 1 < self.m).then(|| self.index(i + 1, j)),
                    (j > 0).then(|| self.index(i, j - 1)),
                    (j + 1 < self.n).then(|| self.index(i, j + 1)),
                ];
                for nb in neighbours {
                    match nb {
                        Some(k) => {
                            diag += 1.0;
                            rows[me].push((k, -1.0));
                        }
                        None => diag += 2.0,
                    }
                }
                rows[me].push((me, diag));
                rows[me].sort_by_key(|e| e.0);
            }
        }
        rows
    }
}

fn lit<T: Real>(v: f64) -> T {
    T::lit(v)
}

/// `(E/L)(κ₀ I + (ℓ/h)² L)` or its shear counterpart, with the block placed at `offset`.
fn influence_rows(grid: &Grid, h: f64, modulus: f64, offset: usize, rows: &mut [Vec<(usize, f64)>]) {
    let scale = modulus / DOMAIN_LENGTH;
    let coupling = (INTERACTION_LENGTH / h).powi(2);
    for (r, lap) in grid.laplacian().into_iter().enumerate() {
        for (c, v) in lap {
            let local = if c == r { LOCAL_STIFFNESS } else { 0.0 };
            rows[offset + r].push((offset + c, scale * (local + coupling * v)));
        }
    }
}

fn to_sparse<T: Real>(rows: Vec<Vec<(usize, f64)>>) -> SparseSymmetric<T> {
    SparseSymmetric {
        rows: rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|e| e.0);
                r.into_iter().map(|(c, v)| (c, lit(v))).collect()
            })
            .collect(),
    }
}

fn check_common<T: Real>(phi: T, u_c: T) -> Result<()> {
    if !(u_c > T::zero()) || !u_c.is_finite() {
        return Err(Error::Config(format!("u_c must be positive, got {u_c}")));
    }
    if !(phi >= T::zero() && phi < T::lit(std::f64::consts::FRAC_PI_2)) {
        return Err(Error::Config(format!("dilation angle must lie in [0, π/2), got {phi}")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assemble<T: Real>(
    physics: Physics,
    fractures: Vec<Fracture<T>>,
    phi: T,
    u_c: T,
    normal_rows: Vec<Vec<(usize, f64)>>,
    tangential_rows: Vec<Vec<(usize, f64)>>,
    external: Vec<[f64; 3]>,
    flow: Option<FlowNetwork<T>>,
) -> Result<FractureAssembly<T>> {
    let couplings = PhysicsCouplings::<T>::default();
    let cells = external.len();
    let scales = characteristic_scales(u_c, couplings.youngs_modulus(), lit(DOMAIN_LENGTH))?;
    let contact = ContactParameters::new(T::one(), phi, scales.c_num, lit(1e-3))?;
    let mut assembly = FractureAssembly {
        physics,
        layout: Layout::new(cells, physics.has_pressure(), physics.has_temperature()),
        fractures,
        scales,
        contact,
        couplings,
        stiffness_normal: to_sparse(normal_rows),
        stiffness_tangential: to_sparse(tangential_rows),
        external_traction: external.into_iter().map(|t| t.map(lit)).collect(),
        previous_jump: vec![[T::zero(); 3]; cells],
        flow: if physics.has_pressure() { flow } else { None },
        regime_init: Some(lit(REGIME_INIT)),
    };
    assembly.compute_reference_flow()?;
    Ok(assembly)
}

fn background_stress() -> f64 {
    let c = PhysicsCouplings::<f64>::default();
    c.youngs_modulus() * BOUNDARY_DISPLACEMENT / DOMAIN_LENGTH
}

/// Single planar fracture of `cells_per_side²` cells with the [`SingleFractureLoading`]
/// defaults. Fluid enters on the left edge and leaves on the right edge.
pub fn make_single_fracture<T: Real>(
    cells_per_side: usize,
    phi: T,
    u_c: T,
    physics: Physics,
) -> Result<FractureAssembly<T>> {
    make_single_fracture_with(cells_per_side, phi, u_c, physics, SingleFractureLoading::default())
}

pub fn make_single_fracture_with<T: Real>(
    cells_per_side: usize,
    phi: T,
    u_c: T,
    physics: Physics,
    loading: SingleFractureLoading,
) -> Result<FractureAssembly<T>> {
    if cells_per_side < 2 {
        return Err(Error::Config(format!("cells_per_side must be at least 2, got {cells_per_side}")));
    }
    check_common(phi, u_c)?;
    let m = cells_per_side;
    let grid = Grid { m, n: m };
    let h = DOMAIN_LENGTH / m as f64;
    let couplings = PhysicsCouplings::<f64>::default();
    let sigma0 = background_stress();

    let mut normal_rows = vec![Vec::new(); grid.cells()];
    let mut tangential_rows = vec![Vec::new(); grid.cells()];
    influence_rows(&grid, h, couplings.youngs_modulus(), 0, &mut normal_rows);
    influence_rows(&grid, h, couplings.shear_modulus, 0, &mut tangential_rows);

    let mut centers = Vec::with_capacity(grid.cells());
    let mut external = Vec::with_capacity(grid.cells());
    for j in 0..m {
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            let y = (j as f64 + 0.5) * h;
            centers.push([lit(x), lit(y), lit(0.5)]);
            let normal = loading.normal_mean + loading.normal_ramp * (x - 0.5);
            external.push([
                sigma0 * normal,
                sigma0 * loading.shear * loading.shear_angle.cos(),
                sigma0 * loading.shear * loading.shear_angle.sin(),
            ]);
        }
    }
    let fracture = Fracture {
        cells: 0..grid.cells(),
        normal: [T::zero(), T::zero(), T::one()],
        tangents: [[T::one(), T::zero(), T::zero()], [T::zero(), T::one(), T::zero()]],
        grid: (m, m),
        centers,
        cell_area: lit(h * h),
    };

    let mut boundary = Vec::new();
    for j in 0..m {
        boundary.push(BoundaryFace {
            cell: grid.index(0, j),
            pressure: lit(INLET_PRESSURE),
            temperature: lit(INLET_TEMPERATURE),
            weight: lit(2.0),
        });
        boundary.push(BoundaryFace {
            cell: grid.index(m - 1, j),
            pressure: lit(OUTLET_PRESSURE),
            temperature: lit(OUTLET_TEMPERATURE),
            weight: lit(2.0),
        });
    }
    let flow = FlowNetwork::new(grid.cells(), grid.faces(), boundary, Vec::new());
    assemble(physics, vec![fracture], phi, u_c, normal_rows, tangential_rows, external, Some(flow))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orthonormal tangent pair for `normal`.
fn tangent_basis(normal: [f64; 3]) -> [[f64; 3]; 2] {
    let axis = if normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t1 = unit(cross(axis, normal));
    let t2 = cross(normal, t1);
    [t1, t2]
}

struct MultiGeometry {
    normal: [f64; 3],
    center: [f64; 3],
}

/// Fractures are drawn one after the other from the seeded stream, so the first `k`
/// fractures of a larger set coincide with the `k`-fracture set.
fn multi_geometry(n_fractures: usize, seed: u64) -> Vec<MultiGeometry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_fractures)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - z * z).sqrt();
            let normal = [r * angle.cos(), r * angle.sin(), z];
            let center = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
            MultiGeometry { normal, center }
        })
        .collect()
}

/// `n_fractures` randomly oriented square fractures of 5×5 cells under a far-field
/// compressive stress, with a well in the centre cell of each fracture alternating between
/// the inlet and outlet values.
pub fn make_multi_fracture<T: Real>(
    n_fractures: usize,
    seed: u64,
    phi: T,
    u_c: T,
    physics: Physics,
) -> Result<FractureAssembly<T>> {
    if n_fractures == 0 {
        return Err(Error::Config("at least one fracture is required".into()));
    }
    check_common(phi, u_c)?;
    let m = MULTI_CELLS_PER_SIDE;
    let grid = Grid { m, n: m };
    let per = grid.cells();
    let total = per * n_fractures;
    let h = MULTI_FRACTURE_SIZE / m as f64;
    let couplings = PhysicsCouplings::<f64>::default();
    let sigma0 = background_stress();
    let stress = [-0.1 * sigma0, -0.4 * sigma0, -sigma0];

    let mut normal_rows = vec![Vec::new(); total];
    let mut tangential_rows = vec![Vec::new(); total];
    let mut fractures = Vec::with_capacity(n_fractures);
    let mut external = Vec::with_capacity(total);
    let mut faces = Vec::new();
    let mut wells = Vec::new();
    for (f, geometry) in multi_geometry(n_fractures, seed).into_iter().enumerate() {
        let offset = f * per;
        influence_rows(&grid, h, couplings.youngs_modulus(), offset, &mut normal_rows);
        influence_rows(&grid, h, couplings.shear_modulus, offset, &mut tangential_rows);
        let n = geometry.normal;
        let [t1, t2] = tangent_basis(n);
        let traction = [stress[0] * n[0], stress[1] * n[1], stress[2] * n[2]];
        let local = [dot(traction, n), dot(traction, t1), dot(traction, t2)];
        let mut centers = Vec::with_capacity(per);
        for j in 0..m {
            for i in 0..m {
                let (s, t) = (
                    (i as f64 + 0.5) * h - 0.5 * MULTI_FRACTURE_SIZE,
                    (j as f64 + 0.5) * h - 0.5 * MULTI_FRACTURE_SIZE,
                );
                centers.push([0, 1, 2].map(|k| lit(geometry.center[k] + s * t1[k] + t * t2[k])));
                external.push(local);
            }
        }
        faces.extend(grid.faces().into_iter().map(|(a, b)| (a + offset, b + offset)));
        let (pressure, temperature) = if f % 2 == 0 {
            (INJECTION_PRESSURE, INLET_TEMPERATURE)
        } else {
            (PRODUCTION_PRESSURE, OUTLET_TEMPERATURE)
        };
        wells.push(Well {
            cell: offset + grid.index(m / 2, m / 2),
            pressure: lit(pressure),
            temperature: lit(temperature),
        });
        fractures.push(Fracture {
            cells: offset..offset + per,
            normal: n.map(lit),
            tangents: [t1.map(lit), t2.map(lit)],
            grid: (m, m),
            centers,
            cell_area: lit(h * h),
        });
    }
    // Weak mean-field interaction between consecutive fractures keeps the operator banded.
    let weak = FRACTURE_COUPLING * couplings.youngs_modulus() / DOMAIN_LENGTH / per as f64;
    for f in 1..n_fractures {
        for a in (f - 1) * per..f * per {
            for b in f * per..(f + 1) * per {
                normal_rows[a].push((b, -weak));
                normal_rows[b].push((a, -weak));
            }
        }
    }
    let flow = FlowNetwork::new(total, faces, Vec::new(), wells);
    assemble(physics, fractures, phi, u_c, normal_rows, tangential_rows, external, Some(flow))
}
