//! Flat unknown vectors and their cell-major layout.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    /// Scaled contact traction, local frame (normal first).
    Traction,
    /// Displacement jump in metres, local frame (normal first).
    Jump,
    /// Scaled pressure.
    Pressure,
    /// Scaled temperature.
    Temperature,
}

impl Field {
    pub fn components(self) -> usize {
        match self {
            Field::Traction | Field::Jump => 3,
            Field::Pressure | Field::Temperature => 1,
        }
    }
}

/// Unknowns are stored cell by cell: `[σ̃(3), ⟦u⟧(3), p̃?, T̃?]` for every fracture cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    cells: usize,
    fields: Vec<Field>,
    offsets: Vec<usize>,
    block: usize,
}

impl Layout {
    pub fn new(cells: usize, pressure: bool, temperature: bool) -> Self {
        let mut fields = vec![Field::Traction, Field::Jump];
        if pressure {
            fields.push(Field::Pressure);
        }
        if temperature {
            fields.push(Field::Temperature);
        }
        let mut offsets = Vec::with_capacity(fields.len());
        let mut block = 0;
        for f in &fields {
            offsets.push(block);
            block += f.components();
        }
        Self { cells, fields, offsets, block }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Unknowns per cell.
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn len(&self) -> usize {
        self.cells * self.block
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has(&self, field: Field) -> bool {
        self.fields.contains(&field)
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn index(&self, field: Field, cell: usize, component: usize) -> Option<usize> {
        let slot = self.fields.iter().position(|&f| f == field)?;
        if cell >= self.cells || component >= field.components() {
            return None;
        }
        Some(cell * self.block + self.offsets[slot] + component)
    }

    /// Inverse of [`Layout::index`].
    pub fn locate(&self, index: usize) -> Option<(Field, usize, usize)> {
        if index >= self.len() {
            return None;
        }
        let cell = index / self.block;
        let within = index % self.block;
        let slot = self.offsets.iter().rposition(|&o| o <= within)?;
        Some((self.fields[slot], cell, within - self.offsets[slot]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector<T> {
    pub values: Vec<T>,
    pub layout: Layout,
}

impl<T: Real> SolutionVector<T> {
    pub fn zeros(layout: Layout) -> Self {
        Self { values: vec![T::zero(); layout.len()], layout }
    }

    pub fn from_values(values: Vec<T>, layout: Layout) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::Dimension { expected: layout.len(), actual: values.len() });
        }
        Ok(Self { values, layout })
    }

    pub fn get(&self, field: Field, cell: usize, component: usize) -> T {
        self.values[self.layout.index(field, cell, component).expect("field present in layout")]
    }

    pub fn set(&mut self, field: Field, cell: usize, component: usize, value: T) {
        let i = self.layout.index(field, cell, component).expect("field present in layout");
        self.values[i] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_a_bijection() {
        for (p, t) in [(false, false), (true, false), (true, true)] {
            let layout = Layout::new(7, p, t);
            assert_eq!(layout.len(), 7 * (6 + p as usize + t as usize));
            let mut seen = vec![false; layout.len()];
            for &field in layout.fields() {
                for cell in 0..7 {
                    for c in 0..field.components() {
                        let i = layout.index(field, cell, c).unwrap();
                        assert!(!seen[i]);
                        seen[i] = true;
                        assert_eq!(layout.locate(i), Some((field, cell, c)));
                    }
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn missing_fields_and_bounds() {
        let layout = Layout::new(2, true, false);
        assert_eq!(layout.index(Field::Temperature, 0, 0), None);
        assert_eq!(layout.index(Field::Pressure, 2, 0), None);
        assert_eq!(layout.index(Field::Jump, 0, 3), None);
        assert_eq!(layout.locate(layout.len()), None);
        assert!(SolutionVector::from_values(vec![0.0_f64; 3], layout).is_err());
    }
}
