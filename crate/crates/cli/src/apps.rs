//! App discovery: one app per top-level directory, identified by the
//! manifest package when there is one.

use std::cmp::Ordering;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use walkdir::WalkDir;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppDir {
    pub app_id: String,
    pub dir_name: String,
    pub path: PathBuf,
    pub package: Option<String>,
    pub version: Option<String>,
}

fn manifest_re() -> &'static (Regex, Regex) {
    static RE: OnceLock<(Regex, Regex)> = OnceLock::new();
    RE.get_or_init(|| {
        (
            Regex::new(r#"\bpackage\s*=\s*"([^"]+)""#).unwrap(),
            Regex::new(r#"android:versionName\s*=\s*"([^"]+)""#).unwrap(),
        )
    })
}

fn find_manifest(dir: &Path) -> Option<PathBuf> {
    WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .find(|e| e.file_type().is_file() && e.file_name() == "AndroidManifest.xml")
        .map(|e| e.into_path())
}

pub fn read_manifest(dir: &Path) -> (Option<String>, Option<String>) {
    let Some(text) = find_manifest(dir).and_then(|p| std::fs::read_to_string(p).ok()) else {
        return (None, None);
    };
    let (pkg, ver) = manifest_re();
    let cap = |re: &Regex| re.captures(&text).map(|c| c[1].to_string());
    (cap(pkg), cap(ver))
}

/// Orders version strings by their numeric and textual pieces, so that
/// `1.10` is newer than `1.9`.
pub fn version_cmp(a: &str, b: &str) -> Ordering {
    let pieces = |s: &str| -> Vec<String> {
        s.split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect()
    };
    let (pa, pb) = (pieces(a), pieces(b));
    for (x, y) in pa.iter().zip(&pb) {
        let ord = match (x.parse::<u64>(), y.parse::<u64>()) {
            (Ok(n), Ok(m)) => n.cmp(&m),
            (Ok(_), Err(_)) => Ordering::Greater,
            (Err(_), Ok(_)) => Ordering::Less,
            (Err(_), Err(_)) => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    pa.len().cmp(&pb.len()).then_with(|| a.cmp(b))
}

/// Top-level directories of `root`, sorted by name, with duplicate package
/// ids reduced to the newest version. Returns the kept apps and the
/// directories dropped as older duplicates.
pub fn discover(root: &Path) -> std::io::Result<(Vec<AppDir>, Vec<String>)> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)?
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_ok_and(|t| t.is_dir()))
        .map(|e| e.path())
        .collect();
    dirs.sort();
    let mut apps: Vec<AppDir> = dirs
        .into_iter()
        .map(|path| {
            let dir_name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let (package, version) = read_manifest(&path);
            AppDir {
                app_id: package.clone().unwrap_or_else(|| dir_name.clone()),
                dir_name,
                path,
                package,
                version,
            }
        })
        .collect();

    let mut dropped = Vec::new();
    let mut kept: Vec<AppDir> = Vec::new();
    for app in apps.drain(..) {
        match kept.iter_mut().find(|k| k.app_id == app.app_id) {
            None => kept.push(app),
            Some(prev) => {
                let newer = version_cmp(
                    app.version.as_deref().unwrap_or(""),
                    prev.version.as_deref().unwrap_or(""),
                ) == Ordering::Greater;
                if newer {
                    dropped.push(std::mem::replace(prev, app).dir_name);
                } else {
                    dropped.push(app.dir_name);
                }
            }
        }
    }
    kept.sort_by(|a, b| a.app_id.cmp(&b.app_id));
    Ok((kept, dropped))
}

/// `.java` files under an app, sorted by path.
pub fn java_files(dir: &Path) -> Vec<PathBuf> {
    WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "java"))
        .map(|e| e.into_path())
        .collect()
}

/// Declared dependencies from Gradle build files, as `group:name:version`.
pub fn declared_dependencies(dir: &Path) -> Vec<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r#"(?m)^\s*(?:implementation|api|compile|compileOnly|runtimeOnly)\s*\(?\s*['"]([^'":]+:[^'":]+:[^'"]+)['"]"#)
            .unwrap()
    });
    let mut out: Vec<String> = WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| {
            let n = e.file_name().to_string_lossy();
            e.file_type().is_file() && (n == "build.gradle" || n == "build.gradle.kts")
        })
        .filter_map(|e| std::fs::read_to_string(e.path()).ok())
        .flat_map(|t| re.captures_iter(&t).map(|c| c[1].to_string()).collect::<Vec<_>>())
        .collect();
    out.sort();
    out.dedup();
    out
}
