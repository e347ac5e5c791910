//! Flattened view of a model input.
//!
//! Affine MRs act on the concatenation
//! [η row-major (t, y, x) | xs | ys | ts | G | F], so every block of the
//! input gets a contiguous segment of one flat vector.

use ndarray::{Array1, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelInput;

/// Input block names, in flat order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Eta,
    Xs,
    Ys,
    Ts,
    G,
    F,
}

impl Block {
    pub const ALL: [Block; 6] = [Block::Eta, Block::Xs, Block::Ys, Block::Ts, Block::G, Block::F];

    pub fn name(&self) -> &'static str {
        match self {
            Block::Eta => "eta",
            Block::Xs => "xs",
            Block::Ys => "ys",
            Block::Ts => "ts",
            Block::G => "g",
            Block::F => "f",
        }
    }
}

/// Segment offsets for one (nt, ny, nx) shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLayout {
    pub nt: usize,
    pub ny: usize,
    pub nx: usize,
}

impl FlatLayout {
    pub fn new(nt: usize, ny: usize, nx: usize) -> Self {
        FlatLayout { nt, ny, nx }
    }

    pub fn eta_len(&self) -> usize {
        self.nt * self.ny * self.nx
    }

    pub fn total_dim(&self) -> usize {
        self.eta_len() + self.nx + self.ny + self.nt + 2
    }

    pub fn eta_offset(&self) -> usize {
        0
    }
    pub fn xs_offset(&self) -> usize {
        self.eta_len()
    }
    pub fn ys_offset(&self) -> usize {
        self.xs_offset() + self.nx
    }
    pub fn ts_offset(&self) -> usize {
        self.ys_offset() + self.ny
    }
    pub fn g_slot(&self) -> usize {
        self.ts_offset() + self.nt
    }
    pub fn f_slot(&self) -> usize {
        self.g_slot() + 1
    }

    /// Flat index of η(k, j, i).
    pub fn eta_index(&self, k: usize, j: usize, i: usize) -> usize {
        (k * self.ny + j) * self.nx + i
    }

    pub fn block_range(&self, block: Block) -> std::ops::Range<usize> {
        match block {
            Block::Eta => 0..self.eta_len(),
            Block::Xs => self.xs_offset()..self.xs_offset() + self.nx,
            Block::Ys => self.ys_offset()..self.ys_offset() + self.ny,
            Block::Ts => self.ts_offset()..self.ts_offset() + self.nt,
            Block::G => self.g_slot()..self.g_slot() + 1,
            Block::F => self.f_slot()..self.f_slot() + 1,
        }
    }

    /// (block, index within block) of a flat index.
    pub fn locate(&self, flat: usize) -> Result<(Block, usize)> {
        for block in Block::ALL {
            let range = self.block_range(block);
            if range.contains(&flat) {
                return Ok((block, flat - range.start));
            }
        }
        Err(Error::validation(format!(
            "flat index {flat} out of range for dimension {}",
            self.total_dim()
        )))
    }

    /// Flat index of (block, index within block).
    pub fn resolve(&self, block: Block, index: usize) -> Result<usize> {
        let range = self.block_range(block);
        if index >= range.len() {
            return Err(Error::validation(format!(
                "index {index} out of range for block {}",
                block.name()
            )));
        }
        Ok(range.start + index)
    }

    /// Layout with the x and y roles exchanged (companion layout of the
    /// transpose MR).
    pub fn transposed(&self) -> FlatLayout {
        FlatLayout {
            nt: self.nt,
            ny: self.nx,
            nx: self.ny,
        }
    }
}

/// Concatenates a model input into one flat vector.
pub fn flatten(input: &ModelInput, layout: &FlatLayout) -> Result<Array1<f64>> {
    if input.nt() != layout.nt || input.ny() != layout.ny || input.nx() != layout.nx {
        return Err(Error::ShapeMismatch {
            expected: format!("({}, {}, {})", layout.nt, layout.ny, layout.nx),
            got: format!("({}, {}, {})", input.nt(), input.ny(), input.nx()),
        });
    }
    let mut out = Vec::with_capacity(layout.total_dim());
    out.extend(input.eta.iter().copied());
    out.extend(input.xs.iter().copied());
    out.extend(input.ys.iter().copied());
    out.extend(input.ts.iter().copied());
    out.push(input.g);
    out.push(input.f);
    Ok(Array1::from_vec(out))
}

/// Inverse of [`flatten`]. Does not validate model invariants: morphed
/// vectors may violate them and evaluation re-validates.
pub fn unflatten(vector: &Array1<f64>, layout: &FlatLayout) -> Result<ModelInput> {
    if vector.len() != layout.total_dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}", layout.total_dim()),
            got: format!("{}", vector.len()),
        });
    }
    let v = vector.as_slice().expect("flat vectors are contiguous");
    let eta = Array3::from_shape_vec(
        (layout.nt, layout.ny, layout.nx),
        v[layout.block_range(Block::Eta)].to_vec(),
    )
    .expect("length checked above");
    let xs = Array1::from_vec(v[layout.block_range(Block::Xs)].to_vec());
    let ys = Array1::from_vec(v[layout.block_range(Block::Ys)].to_vec());
    let ts = Array1::from_vec(v[layout.block_range(Block::Ts)].to_vec());
    Ok(ModelInput::from_parts_unchecked(
        eta,
        xs,
        ys,
        ts,
        v[layout.g_slot()],
        v[layout.f_slot()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_sea_level, GridSpec};
    use ndarray::array;

    #[test]
    fn segments_cover_total_dim_without_overlap() {
        let layout = FlatLayout::new(3, 4, 5);
        let mut covered = vec![false; layout.total_dim()];
        for block in Block::ALL {
            for i in layout.block_range(block) {
                assert!(!covered[i], "overlap at {i}");
                covered[i] = true;
            }
        }
        assert!(covered.iter().all(|c| *c));
    }

    #[test]
    fn flatten_matches_the_documented_order() {
        let layout = FlatLayout::new(1, 1, 2);
        let eta = Array3::from_shape_vec((1, 1, 2), vec![3.0, 4.0]).unwrap();
        let input = ModelInput::from_parts_unchecked(
            eta,
            array![0.0, 1.0],
            array![5.0],
            array![0.0],
            9.81,
            1.0,
        );
        let flat = flatten(&input, &layout).unwrap();
        assert_eq!(flat.to_vec(), vec![3.0, 4.0, 0.0, 1.0, 5.0, 0.0, 9.81, 1.0]);
    }

    #[test]
    fn flatten_round_trips_bit_exactly() {
        let spec = GridSpec::new(3, 4, 2, 10.0, 10.0, 5.0);
        let input = random_sea_level(&spec, 42, 1.0).unwrap();
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let flat = flatten(&input, &layout).unwrap();
        let back = unflatten(&flat, &layout).unwrap();
        assert_eq!(back, input);
    }

    #[test]
    fn wrong_length_vector_is_rejected() {
        let layout = FlatLayout::new(1, 1, 2);
        let bad = Array1::zeros(layout.total_dim() + 1);
        assert!(matches!(
            unflatten(&bad, &layout),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn locate_and_resolve_are_inverse() {
        let layout = FlatLayout::new(2, 3, 4);
        for flat in 0..layout.total_dim() {
            let (block, idx) = layout.locate(flat).unwrap();
            assert_eq!(layout.resolve(block, idx).unwrap(), flat);
        }
        assert!(layout.locate(layout.total_dim()).is_err());
    }
}
