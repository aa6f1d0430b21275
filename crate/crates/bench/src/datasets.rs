//! Registry of the evaluation datasets. Files are plain SNAP edge lists
//! looked up in `$GPASIM_DATA_DIR` (default: `data/` in the workspace).

use std::path::{Path, PathBuf};

use gpasim_graph::{load_binary, load_snap_edge_list, save_binary, Graph, LoadOptions};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dataset {
    /// Short key used in tables, e.g. `sd`.
    pub key: &'static str,
    pub name: &'static str,
    pub file: &'static str,
    /// Lines are stored once per undirected edge and get duplicated at load.
    pub duplicate: bool,
    pub n: u64,
    pub m: u64,
    pub avg_degree: f64,
    /// Too big for a desk run; only used with `--large`.
    pub large: bool,
}

pub const DATASETS: &[Dataset] = &[
    Dataset {
        key: "sd",
        name: "slashdot",
        file: "soc-Slashdot0902.txt",
        duplicate: false,
        n: 82_168,
        m: 948_464,
        avg_degree: 11.54,
        large: false,
    },
    Dataset {
        key: "db",
        name: "dblp",
        file: "com-dblp.ungraph.txt",
        duplicate: true,
        n: 425_957,
        m: 1_049_866,
        avg_degree: 4.93,
        large: false,
    },
    Dataset {
        key: "yt",
        name: "youtube",
        file: "com-youtube.ungraph.txt",
        duplicate: true,
        n: 1_157_828,
        m: 2_987_624,
        avg_degree: 5.16,
        large: false,
    },
    Dataset {
        key: "wt",
        name: "wiki-talk",
        file: "wiki-Talk.txt",
        duplicate: false,
        n: 2_394_385,
        m: 5_021_410,
        avg_degree: 2.10,
        large: false,
    },
    Dataset {
        key: "rd",
        name: "roadnet-ca",
        file: "roadNet-CA.txt",
        duplicate: false,
        n: 1_971_281,
        m: 2_766_607,
        avg_degree: 2.81,
        large: false,
    },
    Dataset {
        key: "bk",
        name: "berk-stan",
        file: "web-BerkStan.txt",
        duplicate: false,
        n: 685_231,
        m: 7_600_595,
        avg_degree: 11.09,
        large: false,
    },
    Dataset {
        key: "lj",
        name: "live-journal",
        file: "soc-LiveJournal1.txt",
        duplicate: false,
        n: 4_847_571,
        m: 68_993_773,
        avg_degree: 14.23,
        large: true,
    },
    Dataset {
        key: "or",
        name: "orkut",
        file: "com-orkut.ungraph.txt",
        duplicate: true,
        n: 3_072_627,
        m: 117_185_083,
        avg_degree: 76.28,
        large: true,
    },
    Dataset {
        key: "tw",
        name: "twitter",
        file: "twitter.txt",
        duplicate: false,
        n: 41_652_230,
        m: 1_468_364_884,
        avg_degree: 35.25,
        large: true,
    },
    Dataset {
        key: "r21",
        name: "rmat-21-86",
        file: "rmat-21-86.txt",
        duplicate: false,
        n: 2_097_152,
        m: 180_355_072,
        avg_degree: 86.00,
        large: true,
    },
    Dataset {
        key: "r24",
        name: "rmat-24-16",
        file: "rmat-24-16.txt",
        duplicate: false,
        n: 16_777_216,
        m: 268_435_456,
        avg_degree: 16.00,
        large: true,
    },
];

pub fn dataset(key_or_name: &str) -> Option<&'static Dataset> {
    DATASETS.iter().find(|d| d.key == key_or_name || d.name == key_or_name)
}

pub fn data_dir() -> PathBuf {
    match std::env::var_os("GPASIM_DATA_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

impl Dataset {
    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file)
    }

    /// Path of the edge list if it is present in the data directory.
    pub fn locate(&self) -> Option<PathBuf> {
        let p = self.path_in(&data_dir());
        p.is_file().then_some(p)
    }

    /// Loads the edge list, going through a binary cache next to it.
    pub fn load(&self, weighted: bool) -> Result<Graph, BenchError> {
        let path = self.locate().ok_or_else(|| BenchError::MissingDataset {
            name: self.name.to_string(),
            path: self.path_in(&data_dir()),
        })?;
        load_edge_list(&path, self.duplicate, weighted)
    }
}

pub fn load_edge_list(path: &Path, duplicate: bool, weighted: bool) -> Result<Graph, BenchError> {
    let cache = path.with_extension("gpabin");
    let g = match load_binary(&cache) {
        Ok(g) => g,
        Err(_) => {
            let opts = LoadOptions {
                weighted: false,
                undirected_duplicate: duplicate,
                compact_ids: false,
            };
            let g = load_snap_edge_list(path, opts)?;
            // a read-only data directory just means no cache
            let _ = save_binary(&g, &cache);
            g
        }
    };
    Ok(g.with_weighted(weighted))
}
