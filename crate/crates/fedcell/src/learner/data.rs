//! Datasets, synthetic fixtures, and the iid / non-iid device partition.

use ndarray::{Array2, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::learner::mlp::{INPUT_DIM, NUM_CLASSES};
use crate::rng::shuffle;

/// A labeled dataset with features in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Row per sample, flattened features.
    pub inputs: Array2<f32>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn new(inputs: Array2<f32>, labels: Vec<u8>) -> Result<Self> {
        if inputs.nrows() != labels.len() {
            return Err(Error::ShapeMismatch);
        }
        Ok(Dataset { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.inputs.ncols()
    }

    /// Owned copy of the rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let inputs = self.inputs.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset { inputs, labels }
    }

    /// Rows `[start, end)` as an f64 matrix for the learner.
    pub fn batch_f64(&self, indices: &[usize]) -> (Array2<f64>, Vec<u8>) {
        let mut batch = Array2::<f64>::zeros((indices.len(), self.feature_dim()));
        for (row, &i) in indices.iter().enumerate() {
            for (col, &v) in self.inputs.row(i).iter().enumerate() {
                batch[[row, col]] = f64::from(v);
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        (batch, labels)
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0usize; NUM_CLASSES];
        for &label in &self.labels {
            counts[label as usize] += 1;
        }
        counts
    }

    /// Number of distinct labels present.
    pub fn label_support(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }
}

/// Gaussian class-cluster blobs in the MLP's input space. Class centers are
/// well separated relative to the cluster spread (10 sigma apart and more),
/// samples are clamped to `[0, 1]`, and labels cycle through the classes so
/// the result is balanced. Deterministic per RNG stream.
pub fn make_synthetic<R: Rng>(
    num_samples: usize,
    num_classes: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if num_samples == 0 {
        return Err(Error::EmptyInput("synthetic dataset"));
    }
    if num_classes == 0 || num_classes > NUM_CLASSES {
        return Err(Error::Config(format!(
            "synthetic class count must lie in 1..={NUM_CLASSES}"
        )));
    }
    const SIGMA: f64 = 0.02;
    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| {
            (0..INPUT_DIM)
                .map(|_| 0.2 + 0.6 * rng.random::<f64>())
                .collect()
        })
        .collect();
    let mut inputs = Array2::<f32>::zeros((num_samples, INPUT_DIM));
    let mut labels = Vec::with_capacity(num_samples);
    for i in 0..num_samples {
        let class = i % num_classes;
        labels.push(class as u8);
        for j in 0..INPUT_DIM {
            // Box-Muller normal draw.
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random::<f64>();
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            inputs[[i, j]] = (centers[class][j] + SIGMA * z).clamp(0.0, 1.0) as f32;
        }
    }
    Dataset::new(inputs, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Uniform samples from the full set, disjoint across devices.
    Iid,
    /// Each device draws only from `classes_per_device` randomly assigned
    /// digit classes.
    NonIid { classes_per_device: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    pub mode: PartitionMode,
    pub per_device_size: usize,
}

impl PartitionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_device_size == 0 {
            return Err(Error::Config("per-device size must be at least 1".into()));
        }
        if let PartitionMode::NonIid { classes_per_device } = self.mode {
            if classes_per_device == 0 || classes_per_device > NUM_CLASSES {
                return Err(Error::Config(format!(
                    "classes per device must lie in 1..={NUM_CLASSES}"
                )));
            }
        }
        Ok(())
    }
}

/// Split `ds` into one local dataset per device.
///
/// iid: a global shuffle chopped into disjoint per-device chunks.
///
/// non-iid: each device is assigned `L` distinct classes uniformly at random,
/// then draws its samples uniformly from the remaining pool of those classes.
/// Pools are consumed without replacement so local sets stay disjoint as long
/// as supply lasts; once a device's pools are exhausted the pools are rewound
/// and sharing begins (the class histogram of the full dataset makes a fully
/// disjoint split impossible for small `L` at full scale).
pub fn partition<R: Rng>(
    ds: &Dataset,
    num_devices: usize,
    spec: &PartitionSpec,
    rng: &mut R,
) -> Result<Vec<Dataset>> {
    spec.validate()?;
    if num_devices == 0 {
        return Err(Error::EmptyInput("device list"));
    }
    match spec.mode {
        PartitionMode::Iid => {
            let need = num_devices * spec.per_device_size;
            if need > ds.len() {
                return Err(Error::InsufficientSamples {
                    requested: need,
                    available: ds.len(),
                });
            }
            let mut order: Vec<usize> = (0..ds.len()).collect();
            shuffle(&mut order, rng);
            Ok(order[..need]
                .chunks(spec.per_device_size)
                .map(|chunk| ds.subset(chunk))
                .collect())
        }
        PartitionMode::NonIid { classes_per_device } => {
            partition_non_iid(ds, num_devices, spec.per_device_size, classes_per_device, rng)
        }
    }
}

fn partition_non_iid<R: Rng>(
    ds: &Dataset,
    num_devices: usize,
    per_device_size: usize,
    classes_per_device: usize,
    rng: &mut R,
) -> Result<Vec<Dataset>> {
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES];
    for (i, &label) in ds.labels.iter().enumerate() {
        pools[label as usize].push(i);
    }
    for pool in pools.iter_mut() {
        shuffle(pool, rng);
    }
    let present: Vec<usize> = (0..NUM_CLASSES).filter(|&c| !pools[c].is_empty()).collect();
    if present.len() < classes_per_device {
        return Err(Error::InsufficientSamples {
            requested: classes_per_device,
            available: present.len(),
        });
    }

    let mut cursor = [0usize; NUM_CLASSES];
    let mut devices = Vec::with_capacity(num_devices);
    for _ in 0..num_devices {
        // L distinct classes, drawn uniformly among those with any samples.
        let picks = crate::rng::sample_indices(rng, present.len(), classes_per_device);
        let classes: Vec<usize> = picks.iter().map(|&p| present[p]).collect();

        let mut chosen = Vec::with_capacity(per_device_size);
        for _ in 0..per_device_size {
            let remaining: Vec<usize> = classes
                .iter()
                .map(|&c| pools[c].len() - cursor[c])
                .collect();
            let total: usize = remaining.iter().sum();
            if total == 0 {
                // Supply exhausted: rewind this device's pools and share.
                for &c in &classes {
                    cursor[c] = 0;
                }
            }
            let remaining: Vec<usize> = classes
                .iter()
                .map(|&c| pools[c].len() - cursor[c])
                .collect();
            let total: usize = remaining.iter().sum();
            let mut pick = rng.random_range(0..total);
            for (slot, &c) in classes.iter().enumerate() {
                if pick < remaining[slot] {
                    chosen.push(pools[c][cursor[c]]);
                    cursor[c] += 1;
                    break;
                }
                pick -= remaining[slot];
            }
        }
        devices.push(ds.subset(&chosen));
    }
    Ok(devices)
}
