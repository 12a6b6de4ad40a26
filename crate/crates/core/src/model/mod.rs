//! Reduced fracture-assembly model problems.
//!
//! Each fracture cell carries a scaled contact traction and a displacement jump (both in the
//! local frame, normal component first), optionally a scaled pressure and temperature. The
//! rows per cell are
//!
//! * force balance `σ̃ − σ̃_ext + K⟦u⟧/σ_c − (α_B p − 3K_dr β_s T)/σ_c e⊥` with a synthetic
//!   symmetric positive definite influence operator `K`,
//! * the two contact complementarity functions,
//! * mass balance with cubic-law transmissibilities and leakage to the matrix,
//! * energy balance with conduction and leakage, its advection upwinded in a fixed flow field.
//!
//! Cells holding a well (or a Dirichlet value) replace their balance rows by `p̃ = p̃_w` and
//! `T̃ = T̃_w`.

mod presets;

use std::ops::Range;

pub use presets::{
    make_multi_fracture, make_single_fracture, make_single_fracture_with, preset, Preset, PresetKind,
    SingleFractureLoading, MULTI_CELLS_PER_SIDE, PRESET_NAMES,
};

use crate::contact::{
    contact_generalized_derivative, normal_complementarity, tangential_complementarity, CellContactState,
    ContactParameters,
};
use crate::linalg::DenseMatrix;
use crate::newton::{ContactSubsystem, NonlinearSystem};
use crate::scalar::Real;
use crate::scaling::CharacteristicScales;
use crate::solution::{Field, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Physics {
    Elastic,
    Poro,
    ThermoPoro,
}

impl Physics {
    pub fn name(self) -> &'static str {
        match self {
            Physics::Elastic => "elastic",
            Physics::Poro => "poro",
            Physics::ThermoPoro => "thermoporo",
        }
    }

    pub fn has_pressure(self) -> bool {
        !matches!(self, Physics::Elastic)
    }

    pub fn has_temperature(self) -> bool {
        matches!(self, Physics::ThermoPoro)
    }
}

/// Material and coupling constants, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsCouplings<T> {
    pub lame_lambda: T,
    pub shear_modulus: T,
    pub biot_coeff: T,
    pub fluid_compressibility: T,
    pub viscosity: T,
    pub fluid_density: T,
    pub fluid_heat_capacity: T,
    pub fluid_conductivity: T,
    pub solid_thermal_expansion: T,
    pub solid_conductivity: T,
    pub matrix_permeability: T,
    pub time_step: T,
    /// Distance over which fracture cells leak into the surrounding matrix.
    pub leakage_distance: T,
    pub reference_pressure: T,
    pub reference_temperature: T,
    /// Characteristic pressure used for the scaled pressure unknown.
    pub pressure_scale: T,
    /// Characteristic temperature used for the scaled temperature unknown.
    pub temperature_scale: T,
}

impl<T: Real> Default for PhysicsCouplings<T> {
    fn default() -> Self {
        let l = T::lit;
        Self {
            lame_lambda: l(2e6),
            shear_modulus: l(2e6),
            biot_coeff: l(0.8),
            fluid_compressibility: l(1e-6),
            viscosity: l(0.1),
            fluid_density: l(1.0),
            fluid_heat_capacity: l(100.0),
            fluid_conductivity: l(1.0),
            solid_thermal_expansion: l(1e-3),
            solid_conductivity: l(1.0),
            matrix_permeability: l(1e-8),
            time_step: l(1e6),
            leakage_distance: l(0.25),
            reference_pressure: l(0.0),
            reference_temperature: l(0.0),
            pressure_scale: l(1e5),
            temperature_scale: l(10.0),
        }
    }
}

impl<T: Real> PhysicsCouplings<T> {
    pub fn youngs_modulus(&self) -> T {
        crate::scaling::youngs_modulus(self.lame_lambda, self.shear_modulus)
    }

    pub fn drained_bulk_modulus(&self) -> T {
        self.lame_lambda + T::lit(2.0 / 3.0) * self.shear_modulus
    }
}

/// Cubic-law transmissibility between two cells of apertures `a_i`, `a_j` for unit face
/// width over unit distance: `((a_i + a_j)/2)³ / (12 μ)`.
pub fn transmissibility<T: Real>(a_i: T, a_j: T, viscosity: T) -> T {
    let mean = T::lit(0.5) * (a_i + a_j);
    mean * mean * mean / (T::lit(12.0) * viscosity)
}

fn transmissibility_derivative<T: Real>(a_i: T, a_j: T, viscosity: T) -> T {
    // d/da_i of the above (same for a_j).
    let mean = T::lit(0.5) * (a_i + a_j);
    T::lit(1.5) * mean * mean / (T::lit(12.0) * viscosity)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fracture<T> {
    pub cells: Range<usize>,
    pub normal: [T; 3],
    pub tangents: [[T; 3]; 2],
    /// Cells along the two tangents.
    pub grid: (usize, usize),
    pub centers: Vec<[T; 3]>,
    pub cell_area: T,
}

/// Prescribed values on a boundary face of a fracture cell (half-cell distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace<T> {
    pub cell: usize,
    pub pressure: T,
    pub temperature: T,
    /// Transmissibility multiplier of the half-cell connection.
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Well<T> {
    pub cell: usize,
    pub pressure: T,
    pub temperature: T,
}

/// Fracture flow graph and the fixed Darcy fluxes used for heat advection.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork<T> {
    pub faces: Vec<(usize, usize)>,
    pub boundary: Vec<BoundaryFace<T>>,
    pub wells: Vec<Well<T>>,
    /// Flux from `faces[k].0` to `faces[k].1`, m³/s.
    pub face_flux: Vec<T>,
    /// Outward flux through each boundary face.
    pub boundary_flux: Vec<T>,
    /// Outward flux into the matrix per cell.
    pub leakage_flux: Vec<T>,
    /// Well index per cell, if any.
    well_of: Vec<Option<usize>>,
}

impl<T: Real> FlowNetwork<T> {
    pub fn new(cells: usize, faces: Vec<(usize, usize)>, boundary: Vec<BoundaryFace<T>>, wells: Vec<Well<T>>) -> Self {
        let mut well_of = vec![None; cells];
        for (k, w) in wells.iter().enumerate() {
            well_of[w.cell] = Some(k);
        }
        Self {
            face_flux: vec![T::zero(); faces.len()],
            boundary_flux: vec![T::zero(); boundary.len()],
            leakage_flux: vec![T::zero(); cells],
            faces,
            boundary,
            wells,
            well_of,
        }
    }

    pub fn well_at(&self, cell: usize) -> Option<&Well<T>> {
        self.well_of[cell].map(|k| &self.wells[k])
    }
}

/// Symmetric sparse operator stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric<T> {
    pub rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseSymmetric<T> {
    pub fn apply(&self, row: usize, x: impl Fn(usize) -> T) -> T {
        self.rows[row].iter().fold(T::zero(), |acc, &(j, k)| acc + k * x(j))
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.rows.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m.add(i, j, v);
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractureAssembly<T> {
    pub physics: Physics,
    pub layout: Layout,
    pub fractures: Vec<Fracture<T>>,
    pub scales: CharacteristicScales<T>,
    pub contact: ContactParameters<T>,
    pub couplings: PhysicsCouplings<T>,
    /// Influence operator for the normal jump, Pa/m.
    pub stiffness_normal: SparseSymmetric<T>,
    /// Influence operator for each tangential jump component, Pa/m.
    pub stiffness_tangential: SparseSymmetric<T>,
    /// Background traction per cell in the local frame, Pa.
    pub external_traction: Vec<[T; 3]>,
    pub previous_jump: Vec<[T; 3]>,
    pub flow: Option<FlowNetwork<T>>,
    /// Scaled normal traction assigned to loaded cells in the initial guess; `None` keeps the
    /// zero state.
    pub regime_init: Option<T>,
}

impl<T: Real> FractureAssembly<T> {
    pub fn cells(&self) -> usize {
        self.layout.cells()
    }

    fn idx(&self, field: Field, cell: usize, component: usize) -> usize {
        self.layout.index(field, cell, component).expect("field in layout")
    }

    fn aperture(&self, x: &[T], cell: usize) -> T {
        self.contact.residual_aperture + x[self.idx(Field::Jump, cell, 0)]
    }

    fn cell_area(&self, cell: usize) -> T {
        self.fractures
            .iter()
            .find(|f| f.cells.contains(&cell))
            .map(|f| f.cell_area)
            .expect("cell belongs to a fracture")
    }

    /// Characteristic volumetric flux `a_res³ p_c / (12 μ)`.
    pub fn flux_scale(&self) -> T {
        transmissibility(self.contact.residual_aperture, self.contact.residual_aperture, self.couplings.viscosity)
            * self.couplings.pressure_scale
    }

    pub fn energy_scale(&self) -> T {
        let c = &self.couplings;
        c.fluid_density * c.fluid_heat_capacity * self.flux_scale() * c.temperature_scale
    }

    fn leakage_transmissibility(&self, cell: usize) -> T {
        let c = &self.couplings;
        c.matrix_permeability / c.viscosity * self.cell_area(cell) / c.leakage_distance
    }

    fn leakage_conductance(&self, cell: usize) -> T {
        let c = &self.couplings;
        c.solid_conductivity * self.cell_area(cell) / c.leakage_distance
    }

    /// Zero jumps at the reference pressure and temperature. The regime initialization sets the
    /// normal traction where the background loading is compressive.
    pub fn initial_guess(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.layout.len()];
        if let Some(init) = self.regime_init {
            for (cell, t) in self.external_traction.iter().enumerate() {
                if t[0] < T::zero() {
                    x[self.idx(Field::Traction, cell, 0)] = init;
                }
            }
        }
        let c = &self.couplings;
        for cell in 0..self.cells() {
            if self.layout.has(Field::Pressure) {
                x[self.idx(Field::Pressure, cell, 0)] = c.reference_pressure / c.pressure_scale;
            }
            if self.layout.has(Field::Temperature) {
                x[self.idx(Field::Temperature, cell, 0)] = c.reference_temperature / c.temperature_scale;
            }
        }
        x
    }

    pub fn states(&self, x: &[T]) -> Vec<CellContactState<T>> {
        let mut out = Vec::with_capacity(self.cells());
        for f in &self.fractures {
            for cell in f.cells.clone() {
                let t = |c| x[self.idx(Field::Traction, cell, c)];
                let u = |c| x[self.idx(Field::Jump, cell, c)];
                let prev = self.previous_jump[cell];
                out.push(CellContactState {
                    traction_n: t(0),
                    traction_t: [t(1), t(2)],
                    jump_n: u(0),
                    jump_t: [u(1), u(2)],
                    jump_t_prev: [prev[1], prev[2]],
                    normal: f.normal,
                });
            }
        }
        out
    }

    /// Runs the residual-aperture pressure problem and stores its Darcy fluxes as the fixed
    /// advective field.
    pub fn compute_reference_flow(&mut self) -> crate::Result<()> {
        let Some(flow) = self.flow.as_ref() else { return Ok(()) };
        let n = self.cells();
        let a = self.contact.residual_aperture;
        let mu = self.couplings.viscosity;
        let t_res = transmissibility(a, a, mu);
        let p_ref = self.couplings.reference_pressure;
        let mut m = DenseMatrix::zeros(n, n);
        let mut rhs = vec![T::zero(); n];
        for &(i, j) in &flow.faces {
            for (r, o) in [(i, j), (j, i)] {
                if flow.well_at(r).is_none() {
                    m.add(r, r, t_res);
                    m.add(r, o, -t_res);
                }
            }
        }
        for b in &flow.boundary {
            if flow.well_at(b.cell).is_none() {
                m.add(b.cell, b.cell, b.weight * t_res);
                rhs[b.cell] = rhs[b.cell] + b.weight * t_res * b.pressure;
            }
        }
        for cell in 0..n {
            if let Some(w) = flow.well_at(cell) {
                m.add(cell, cell, T::one());
                rhs[cell] = w.pressure;
            } else {
                let leak = self.leakage_transmissibility(cell);
                m.add(cell, cell, leak);
                rhs[cell] = rhs[cell] + leak * p_ref;
            }
        }
        let p = crate::linalg::linear_solve(&m, &rhs)?;
        let face_flux = flow.faces.iter().map(|&(i, j)| t_res * (p[i] - p[j])).collect();
        let boundary_flux = flow.boundary.iter().map(|b| b.weight * t_res * (p[b.cell] - b.pressure)).collect();
        let leakage_flux = (0..n).map(|cell| self.leakage_transmissibility(cell) * (p[cell] - p_ref)).collect();
        let flow = self.flow.as_mut().expect("checked above");
        flow.face_flux = face_flux;
        flow.boundary_flux = boundary_flux;
        flow.leakage_flux = leakage_flux;
        Ok(())
    }

    fn mechanics_coupling(&self, x: &[T], cell: usize) -> T {
        let c = &self.couplings;
        let mut load = T::zero();
        if self.layout.has(Field::Pressure) {
            let p = x[self.idx(Field::Pressure, cell, 0)] * c.pressure_scale;
            load = load + c.biot_coeff * (p - c.reference_pressure);
        }
        if self.layout.has(Field::Temperature) {
            let temp = x[self.idx(Field::Temperature, cell, 0)] * c.temperature_scale;
            load = load
                - T::lit(3.0)
                    * self.couplings.drained_bulk_modulus()
                    * c.solid_thermal_expansion
                    * (temp - c.reference_temperature);
        }
        load / self.scales.sigma_c
    }

    fn residual_mechanics(&self, x: &[T], out: &mut [T]) {
        let sigma_c = self.scales.sigma_c;
        for cell in 0..self.cells() {
            for comp in 0..3 {
                let k = if comp == 0 { &self.stiffness_normal } else { &self.stiffness_tangential };
                let ku = k.apply(cell, |j| x[self.idx(Field::Jump, j, comp)]);
                let mut r = x[self.idx(Field::Traction, cell, comp)] - self.external_traction[cell][comp] / sigma_c
                    + ku / sigma_c;
                if comp == 0 {
                    r = r - self.mechanics_coupling(x, cell);
                }
                out[self.idx(Field::Traction, cell, comp)] = r;
            }
        }
    }

    fn residual_contact(&self, x: &[T], out: &mut [T]) {
        for (cell, state) in self.states(x).iter().enumerate() {
            out[self.idx(Field::Jump, cell, 0)] = normal_complementarity(state, &self.contact);
            let ct = tangential_complementarity(state, &self.contact);
            out[self.idx(Field::Jump, cell, 1)] = ct[0];
            out[self.idx(Field::Jump, cell, 2)] = ct[1];
        }
    }

    fn pressure(&self, x: &[T], cell: usize) -> T {
        x[self.idx(Field::Pressure, cell, 0)] * self.couplings.pressure_scale
    }

    fn temperature(&self, x: &[T], cell: usize) -> T {
        x[self.idx(Field::Temperature, cell, 0)] * self.couplings.temperature_scale
    }

    fn residual_mass(&self, flow: &FlowNetwork<T>, x: &[T], out: &mut [T]) {
        let c = &self.couplings;
        let q_c = self.flux_scale();
        let n = self.cells();
        let mut acc = vec![T::zero(); n];
        for cell in 0..n {
            let a = self.aperture(x, cell);
            let a0 = self.contact.residual_aperture + self.previous_jump[cell][0];
            let p = self.pressure(x, cell);
            acc[cell] = self.cell_area(cell) * ((a - a0) + a * c.fluid_compressibility * (p - c.reference_pressure))
                / c.time_step
                + self.leakage_transmissibility(cell) * (p - c.reference_pressure);
        }
        for &(i, j) in &flow.faces {
            let flux = transmissibility(self.aperture(x, i), self.aperture(x, j), c.viscosity)
                * (self.pressure(x, i) - self.pressure(x, j));
            acc[i] = acc[i] + flux;
            acc[j] = acc[j] - flux;
        }
        for b in &flow.boundary {
            let a = self.aperture(x, b.cell);
            acc[b.cell] =
                acc[b.cell] + b.weight * transmissibility(a, a, c.viscosity) * (self.pressure(x, b.cell) - b.pressure);
        }
        for cell in 0..n {
            let row = self.idx(Field::Pressure, cell, 0);
            out[row] = match flow.well_at(cell) {
                Some(w) => x[row] - w.pressure / c.pressure_scale,
                None => acc[cell] / q_c,
            };
        }
    }

    fn residual_energy(&self, flow: &FlowNetwork<T>, x: &[T], out: &mut [T]) {
        let c = &self.couplings;
        let rho_c = c.fluid_density * c.fluid_heat_capacity;
        let e_c = self.energy_scale();
        let n = self.cells();
        let mut acc = vec![T::zero(); n];
        for cell in 0..n {
            let a = self.aperture(x, cell);
            let theta = self.temperature(x, cell);
            let leak = flow.leakage_flux[cell];
            let advected = if leak > T::zero() { leak * theta } else { leak * c.reference_temperature };
            acc[cell] = self.cell_area(cell) * rho_c * a * (theta - c.reference_temperature) / c.time_step
                + self.leakage_conductance(cell) * (theta - c.reference_temperature)
                + rho_c * advected;
        }
        for (k, &(i, j)) in flow.faces.iter().enumerate() {
            let a_face = T::lit(0.5) * (self.aperture(x, i) + self.aperture(x, j));
            let (ti, tj) = (self.temperature(x, i), self.temperature(x, j));
            let q = flow.face_flux[k];
            let upwind = if q > T::zero() { ti } else { tj };
            let flux = c.fluid_conductivity * a_face * (ti - tj) + rho_c * q * upwind;
            acc[i] = acc[i] + flux;
            acc[j] = acc[j] - flux;
        }
        for (k, b) in flow.boundary.iter().enumerate() {
            let a = self.aperture(x, b.cell);
            let theta = self.temperature(x, b.cell);
            let q = flow.boundary_flux[k];
            let upwind = if q > T::zero() { theta } else { b.temperature };
            acc[b.cell] =
                acc[b.cell] + b.weight * c.fluid_conductivity * a * (theta - b.temperature) + rho_c * q * upwind;
        }
        for cell in 0..n {
            let row = self.idx(Field::Temperature, cell, 0);
            out[row] = match flow.well_at(cell) {
                Some(w) => x[row] - w.temperature / c.temperature_scale,
                None => acc[cell] / e_c,
            };
        }
    }

    fn jacobian_mechanics(&self, jac: &mut DenseMatrix<T>) {
        let c = &self.couplings;
        let sigma_c = self.scales.sigma_c;
        for cell in 0..self.cells() {
            for comp in 0..3 {
                let row = self.idx(Field::Traction, cell, comp);
                jac.add(row, row, T::one());
                let k = if comp == 0 { &self.stiffness_normal } else { &self.stiffness_tangential };
                for &(j, v) in &k.rows[cell] {
                    jac.add(row, self.idx(Field::Jump, j, comp), v / sigma_c);
                }
                if comp == 0 {
                    if self.layout.has(Field::Pressure) {
                        jac.add(row, self.idx(Field::Pressure, cell, 0), -c.biot_coeff * c.pressure_scale / sigma_c);
                    }
                    if self.layout.has(Field::Temperature) {
                        let d =
                            T::lit(3.0) * c.drained_bulk_modulus() * c.solid_thermal_expansion * c.temperature_scale;
                        jac.add(row, self.idx(Field::Temperature, cell, 0), d / sigma_c);
                    }
                }
            }
        }
    }

    fn jacobian_contact(&self, x: &[T], jac: &mut DenseMatrix<T>) {
        for (cell, state) in self.states(x).iter().enumerate() {
            let d = contact_generalized_derivative(state, &self.contact);
            let sn = self.idx(Field::Traction, cell, 0);
            let un = self.idx(Field::Jump, cell, 0);
            let row_n = un;
            jac.add(row_n, sn, d.normal_wrt_traction_n);
            jac.add(row_n, un, d.normal_wrt_jump_n);
            for k in 0..2 {
                jac.add(row_n, un + 1 + k, d.normal_wrt_jump_t[k]);
            }
            for i in 0..2 {
                let row = un + 1 + i;
                jac.add(row, sn, d.tangential_wrt_traction_n[i]);
                for j in 0..2 {
                    jac.add(row, sn + 1 + j, d.tangential_wrt_traction_t[i][j]);
                    jac.add(row, un + 1 + j, d.tangential_wrt_jump_t[i][j]);
                }
            }
        }
    }

    fn jacobian_mass(&self, flow: &FlowNetwork<T>, x: &[T], jac: &mut DenseMatrix<T>) {
        let c = &self.couplings;
        let q_c = self.flux_scale();
        let p_c = c.pressure_scale;
        let row = |cell| self.idx(Field::Pressure, cell, 0);
        let jump = |cell| self.idx(Field::Jump, cell, 0);
        let active = |cell| flow.well_at(cell).is_none();
        for cell in 0..self.cells() {
            if !active(cell) {
                jac.add(row(cell), row(cell), T::one());
                continue;
            }
            let a = self.aperture(x, cell);
            let p = self.pressure(x, cell) - c.reference_pressure;
            let area_dt = self.cell_area(cell) / c.time_step;
            jac.add(row(cell), jump(cell), area_dt * (T::one() + c.fluid_compressibility * p) / q_c);
            jac.add(
                row(cell),
                row(cell),
                (area_dt * a * c.fluid_compressibility + self.leakage_transmissibility(cell)) * p_c / q_c,
            );
        }
        for &(i, j) in &flow.faces {
            let (ai, aj) = (self.aperture(x, i), self.aperture(x, j));
            let t = transmissibility(ai, aj, c.viscosity);
            let dt = transmissibility_derivative(ai, aj, c.viscosity);
            let dp = self.pressure(x, i) - self.pressure(x, j);
            for (r, sign) in [(i, T::one()), (j, -T::one())] {
                if !active(r) {
                    continue;
                }
                jac.add(row(r), jump(i), sign * dt * dp / q_c);
                jac.add(row(r), jump(j), sign * dt * dp / q_c);
                jac.add(row(r), row(i), sign * t * p_c / q_c);
                jac.add(row(r), row(j), -sign * t * p_c / q_c);
            }
        }
        for b in &flow.boundary {
            if !active(b.cell) {
                continue;
            }
            let a = self.aperture(x, b.cell);
            let dp = self.pressure(x, b.cell) - b.pressure;
            let r = row(b.cell);
            jac.add(
                r,
                jump(b.cell),
                b.weight * T::lit(2.0) * transmissibility_derivative(a, a, c.viscosity) * dp / q_c,
            );
            jac.add(r, r, b.weight * transmissibility(a, a, c.viscosity) * p_c / q_c);
        }
    }

    fn jacobian_energy(&self, flow: &FlowNetwork<T>, x: &[T], jac: &mut DenseMatrix<T>) {
        let c = &self.couplings;
        let rho_c = c.fluid_density * c.fluid_heat_capacity;
        let e_c = self.energy_scale();
        let t_c = c.temperature_scale;
        let row = |cell| self.idx(Field::Temperature, cell, 0);
        let jump = |cell| self.idx(Field::Jump, cell, 0);
        let active = |cell| flow.well_at(cell).is_none();
        let half = T::lit(0.5);
        for cell in 0..self.cells() {
            if !active(cell) {
                jac.add(row(cell), row(cell), T::one());
                continue;
            }
            let a = self.aperture(x, cell);
            let theta = self.temperature(x, cell) - c.reference_temperature;
            let area_dt = self.cell_area(cell) * rho_c / c.time_step;
            jac.add(row(cell), jump(cell), area_dt * theta / e_c);
            let leak = flow.leakage_flux[cell];
            let advective = if leak > T::zero() { rho_c * leak } else { T::zero() };
            jac.add(row(cell), row(cell), (area_dt * a + self.leakage_conductance(cell) + advective) * t_c / e_c);
        }
        for (k, &(i, j)) in flow.faces.iter().enumerate() {
            let a_face = half * (self.aperture(x, i) + self.aperture(x, j));
            let dtheta = self.temperature(x, i) - self.temperature(x, j);
            let q = flow.face_flux[k];
            let upwind = if q > T::zero() { i } else { j };
            for (r, sign) in [(i, T::one()), (j, -T::one())] {
                if !active(r) {
                    continue;
                }
                let k_cond = c.fluid_conductivity * a_face * t_c / e_c;
                jac.add(row(r), jump(i), sign * c.fluid_conductivity * half * dtheta / e_c);
                jac.add(row(r), jump(j), sign * c.fluid_conductivity * half * dtheta / e_c);
                jac.add(row(r), row(i), sign * k_cond);
                jac.add(row(r), row(j), -sign * k_cond);
                jac.add(row(r), row(upwind), sign * rho_c * q * t_c / e_c);
            }
        }
        for (k, b) in flow.boundary.iter().enumerate() {
            if !active(b.cell) {
                continue;
            }
            let a = self.aperture(x, b.cell);
            let dtheta = self.temperature(x, b.cell) - b.temperature;
            let r = row(b.cell);
            jac.add(r, jump(b.cell), b.weight * c.fluid_conductivity * dtheta / e_c);
            let q = flow.boundary_flux[k];
            let advective = if q > T::zero() { rho_c * q } else { T::zero() };
            jac.add(r, r, (b.weight * c.fluid_conductivity * a + advective) * t_c / e_c);
        }
    }

    /// Dense copy of the normal or tangential influence operator.
    pub fn stiffness_matrix(&self, tangential: bool) -> DenseMatrix<T> {
        if tangential { &self.stiffness_tangential } else { &self.stiffness_normal }.to_dense()
    }
}

impl<T: Real> NonlinearSystem<T> for FractureAssembly<T> {
    fn dimension(&self) -> usize {
        self.layout.len()
    }

    fn residual(&self, x: &[T], out: &mut [T]) {
        assert_eq!(x.len(), self.layout.len(), "iterate length");
        assert_eq!(out.len(), self.layout.len(), "residual length");
        self.residual_mechanics(x, out);
        self.residual_contact(x, out);
        if let Some(flow) = &self.flow {
            if self.layout.has(Field::Pressure) {
                self.residual_mass(flow, x, out);
            }
            if self.layout.has(Field::Temperature) {
                self.residual_energy(flow, x, out);
            }
        }
    }

    fn jacobian(&self, x: &[T], jac: &mut DenseMatrix<T>) {
        jac.fill_zero();
        self.jacobian_mechanics(jac);
        self.jacobian_contact(x, jac);
        if let Some(flow) = &self.flow {
            if self.layout.has(Field::Pressure) {
                self.jacobian_mass(flow, x, jac);
            }
            if self.layout.has(Field::Temperature) {
                self.jacobian_energy(flow, x, jac);
            }
        }
    }

    fn contact(&self) -> Option<&dyn ContactSubsystem<T>> {
        Some(self)
    }
}

impl<T: Real> ContactSubsystem<T> for FractureAssembly<T> {
    fn parameters(&self) -> ContactParameters<T> {
        self.contact
    }

    fn fractures(&self) -> Vec<Range<usize>> {
        self.fractures.iter().map(|f| f.cells.clone()).collect()
    }

    fn cell_states(&self, x: &[T]) -> Vec<CellContactState<T>> {
        self.states(x)
    }
}
