//! Download and cache of TUDataset archives.
//!
//! Layout: `{cache_dir}/{name}.zip` with the members extracted (flattened)
//! into `{cache_dir}/{name}/`.

use std::collections::HashMap;
use std::fs;
use std::io::{Cursor, Read};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use super::GraphError;

pub const DEFAULT_BASE_URL: &str = "https://www.chrsmrrs.com/graphkerneldatasets";

/// `$XDG_CACHE_HOME/molhd`, else `$HOME/.cache/molhd`, else `./.molhd-cache`.
pub fn default_cache_dir() -> PathBuf {
    let non_empty = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(xdg) = non_empty("XDG_CACHE_HOME") {
        xdg.join("molhd")
    } else if let Some(home) = non_empty("HOME") {
        home.join(".cache").join("molhd")
    } else {
        PathBuf::from(".molhd-cache")
    }
}

const MANDATORY: [&str; 3] = ["A", "graph_indicator", "graph_labels"];

/// Byte source for archives; swapped out in tests.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// Blocking HTTP(S) transport.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_connect(Some(Duration::from_secs(30)))
            .build()
            .into();
        let mut response = agent.get(url).call().map_err(|e| e.to_string())?;
        response
            .body_mut()
            .with_config()
            .limit(1 << 31)
            .read_to_vec()
            .map_err(|e| e.to_string())
    }
}

fn name_lock(name: &str) -> Arc<Mutex<()>> {
    static LOCKS: OnceLock<Mutex<HashMap<String, Arc<Mutex<()>>>>> = OnceLock::new();
    let mut map = LOCKS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    Arc::clone(map.entry(name.to_owned()).or_default())
}

fn is_complete(dir: &Path, name: &str) -> bool {
    MANDATORY
        .iter()
        .all(|s| dir.join(format!("{name}_{s}.txt")).is_file())
}

/// Returns the extracted directory of `name`, downloading
/// `{base_url}/{name}.zip` over HTTP on a cache miss.
pub fn fetch_dataset(name: &str, cache_dir: &Path, base_url: &str) -> Result<PathBuf, GraphError> {
    fetch_dataset_with(&HttpTransport, name, cache_dir, base_url)
}

pub fn fetch_dataset_with(
    transport: &dyn Transport,
    name: &str,
    cache_dir: &Path,
    base_url: &str,
) -> Result<PathBuf, GraphError> {
    let fail = |message: String| GraphError::Fetch {
        name: name.to_owned(),
        message,
    };
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(fail("invalid dataset name".into()));
    }
    let lock = name_lock(name);
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

    let dir = cache_dir.join(name);
    if is_complete(&dir, name) {
        return Ok(dir);
    }
    fs::create_dir_all(cache_dir).map_err(|e| fail(format!("{}: {e}", cache_dir.display())))?;

    let archive = cache_dir.join(format!("{name}.zip"));
    let bytes = if archive.is_file() {
        fs::read(&archive).map_err(|e| fail(e.to_string()))?
    } else {
        let url = format!("{}/{name}.zip", base_url.trim_end_matches('/'));
        log::info!("downloading {url}");
        let bytes = transport.get(&url).map_err(|e| fail(format!("GET {url}: {e}")))?;
        let partial = cache_dir.join(format!("{name}.zip.part"));
        fs::write(&partial, &bytes).map_err(|e| fail(e.to_string()))?;
        fs::rename(&partial, &archive).map_err(|e| fail(e.to_string()))?;
        bytes
    };

    if let Err(e) = extract(&bytes, name, &dir) {
        // A corrupt cached archive must not poison later attempts.
        let _ = fs::remove_file(&archive);
        let _ = fs::remove_dir_all(&dir);
        return Err(fail(e));
    }
    Ok(dir)
}

fn extract(bytes: &[u8], name: &str, dir: &Path) -> Result<(), String> {
    let mut zip = zip::ZipArchive::new(Cursor::new(bytes)).map_err(|e| format!("corrupt archive: {e}"))?;
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let prefix = format!("{name}_");
    for i in 0..zip.len() {
        let mut entry = zip.by_index(i).map_err(|e| format!("corrupt archive: {e}"))?;
        if entry.is_dir() {
            continue;
        }
        let member = entry.name().to_owned();
        let base = member.rsplit('/').next().unwrap_or(&member);
        if !base.starts_with(&prefix) || !base.ends_with(".txt") {
            continue;
        }
        let mut body = Vec::new();
        entry
            .read_to_end(&mut body)
            .map_err(|e| format!("corrupt member {member}: {e}"))?;
        fs::write(dir.join(base), body).map_err(|e| e.to_string())?;
    }
    if let Some(missing) = MANDATORY
        .iter()
        .find(|s| !dir.join(format!("{name}_{s}.txt")).is_file())
    {
        return Err(format!("archive has no {name}_{missing}.txt member"));
    }
    Ok(())
}
