//! Dataset ingestion: STL-10 binary splits and directories of PPM files.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use limevis_core::LabeledDataset;

use crate::error::{LimevisError, Result};
use crate::formats::{self, STL10_CLASS_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Stl10,
    PpmDir,
}

impl FromStr for DatasetFormat {
    type Err = LimevisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stl10" | "stl10-binary" => Ok(DatasetFormat::Stl10),
            "ppmdir" | "ppm-directory" => Ok(DatasetFormat::PpmDir),
            other => Err(LimevisError::BadRequest(format!("unknown dataset format {other:?}"))),
        }
    }
}

impl DatasetFormat {
    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Stl10 => "stl10",
            DatasetFormat::PpmDir => "ppmdir",
        }
    }
}

/// A loaded dataset plus the files it came from.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: LabeledDataset,
    pub format: DatasetFormat,
    /// Image file (STL-10) or root directory (PPM).
    pub source: PathBuf,
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<LoadedDataset> {
    match format {
        DatasetFormat::Stl10 => load_stl10(path),
        DatasetFormat::PpmDir => load_ppm_dir(path),
    }
}

/// Resolves the STL-10 image file. A directory resolves to its `test_X.bin`,
/// falling back to `train_X.bin`.
fn stl10_image_path(path: &Path) -> Result<PathBuf> {
    if !path.is_dir() {
        return Ok(path.to_path_buf());
    }
    ["test_X.bin", "train_X.bin"]
        .iter()
        .map(|n| path.join(n))
        .find(|p| p.is_file())
        .ok_or_else(|| LimevisError::MalformedFile(format!("no test_X.bin or train_X.bin in {}", path.display())))
}

/// `foo_X.bin` pairs with `foo_y.bin`; any other name pairs with `<stem>_y.bin`.
pub fn stl10_label_path(images: &Path) -> PathBuf {
    let name = images.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let label_name = match name.strip_suffix("_X.bin") {
        Some(stem) => format!("{stem}_y.bin"),
        None => {
            let stem = images.file_stem().and_then(|n| n.to_str()).unwrap_or_default();
            format!("{stem}_y.bin")
        }
    };
    images.with_file_name(label_name)
}

fn read_names(path: &Path) -> Result<Option<Vec<String>>> {
    if !path.is_file() {
        return Ok(None);
    }
    let names: Vec<String> =
        fs::read_to_string(path)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    Ok(Some(names))
}

pub fn load_stl10(path: &Path) -> Result<LoadedDataset> {
    let image_path = stl10_image_path(path)?;
    let bytes = fs::read(&image_path)?;
    let count = formats::stl10_record_count(&bytes)?;
    let label_path = stl10_label_path(&image_path);
    let labels = formats::read_stl10_labels(&fs::read(&label_path)?)?;
    if labels.len() != count {
        return Err(LimevisError::LabelImageCountMismatch { images: count, labels: labels.len() });
    }
    let names = match read_names(&image_path.with_file_name("class_names.txt"))? {
        Some(n) => n,
        None => STL10_CLASS_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    if names.len() < 10 {
        return Err(LimevisError::MalformedFile(format!("class_names.txt lists {} of 10 classes", names.len())));
    }
    let images = (0..count).map(|i| formats::read_stl10_record(&bytes, i)).collect::<Result<Vec<_>>>()?;
    let dataset = LabeledDataset::new(images, labels, names)?;
    Ok(LoadedDataset { dataset, format: DatasetFormat::Stl10, source: image_path })
}

/// `<root>/categories.txt` lists categories in label order; images are
/// `<root>/<category>/<n>.ppm`, taken in ascending `n`.
pub fn load_ppm_dir(root: &Path) -> Result<LoadedDataset> {
    let names = read_names(&root.join("categories.txt"))?
        .ok_or_else(|| LimevisError::MalformedFile(format!("{} has no categories.txt", root.display())))?;
    if names.is_empty() {
        return Err(LimevisError::MalformedFile("categories.txt is empty".into()));
    }
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (label, name) in names.iter().enumerate() {
        let dir = root.join(name);
        if !dir.is_dir() {
            continue;
        }
        let mut files: Vec<(u64, PathBuf)> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "ppm"))
            .filter_map(|p| {
                let n = p.file_stem()?.to_str()?.parse().ok()?;
                Some((n, p))
            })
            .collect();
        files.sort();
        for (_, p) in files {
            images.push(formats::read_ppm(&fs::read(&p)?)?);
            labels.push(label);
        }
    }
    let dataset = LabeledDataset::new(images, labels, names)?;
    Ok(LoadedDataset { dataset, format: DatasetFormat::PpmDir, source: root.to_path_buf() })
}

/// Writes `dataset` in the PPM directory layout.
pub fn write_ppm_dir(root: &Path, dataset: &LabeledDataset) -> Result<()> {
    fs::create_dir_all(root)?;
    fs::write(root.join("categories.txt"), dataset.category_names.join("\n") + "\n")?;
    let mut next = vec![0usize; dataset.class_count()];
    for (img, &label) in dataset.images.iter().zip(&dataset.labels) {
        let dir = root.join(&dataset.category_names[label]);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(format!("{}.ppm", next[label])), formats::write_ppm(img))?;
        next[label] += 1;
    }
    Ok(())
}

/// Category by exact name, or by numeric index.
pub fn resolve_category(dataset: &LabeledDataset, name: &str) -> Result<usize> {
    if let Some(i) = dataset.category_names.iter().position(|n| n == name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if i < dataset.class_count() => Ok(i),
        _ => Err(LimevisError::UnknownCategory(name.to_string())),
    }
}
