use std::collections::BTreeSet;

use crate::model::LibraryId;
use crate::source::{Expr, ExprKind, SourceUnit};

use super::walk::unit_exprs;

const PREFIXES: &[(&str, LibraryId)] = &[
    ("okhttp3.", LibraryId::OkHttp),
    ("com.squareup.okhttp.", LibraryId::OkHttp),
    ("retrofit2.", LibraryId::Retrofit),
    ("retrofit.", LibraryId::Retrofit),
    ("com.android.volley.", LibraryId::Volley),
    ("com.bumptech.glide.", LibraryId::Glide),
    ("com.koushikdutta.ion.", LibraryId::Ion),
    ("org.apache.http.", LibraryId::ApacheHttpclient),
    ("com.loopj.android.", LibraryId::Loopj),
    ("org.json.", LibraryId::OrgJson),
    ("com.google.gson.", LibraryId::Gson),
    ("com.squareup.moshi.", LibraryId::Moshi),
];

/// Library owning a fully qualified name, if any.
pub fn library_for_name(name: &str) -> Option<LibraryId> {
    if let Some(class) = name.strip_prefix("java.net.") {
        let class = class.split('.').next().unwrap_or(class);
        return match class {
            "HttpURLConnection" => Some(LibraryId::JavaNetHttpUrlConnection),
            "HttpsURLConnection" => Some(LibraryId::JavaNetHttpsUrlConnection),
            "URLConnection" | "URL" | "*" => Some(LibraryId::JavaNetUrlConnection),
            "Socket" => Some(LibraryId::JavaNetSocket),
            _ => None,
        };
    }
    if name.starts_with("javax.net.ssl.HttpsURLConnection") {
        return Some(LibraryId::JavaNetHttpsUrlConnection);
    }
    PREFIXES.iter().find(|(p, _)| name.starts_with(p)).map(|(_, id)| *id)
}

/// Libraries used by a unit, judged by its imports and fully qualified
/// receivers and constructors.
pub fn detect_libraries(unit: &SourceUnit) -> BTreeSet<LibraryId> {
    let mut out = BTreeSet::new();
    for imp in &unit.imports {
        let path = if imp.wildcard {
            format!("{}.*", imp.path)
        } else {
            imp.path.clone()
        };
        out.extend(library_for_name(&path));
    }
    let mut visit = |e: &Expr| {
        let name = match &e.kind {
            ExprKind::New { type_name, .. } if type_name.contains('.') => Some(type_name.clone()),
            ExprKind::MethodCall { receiver: Some(r), .. } => r.qualified_name().filter(|q| q.contains('.')),
            _ => None,
        };
        if let Some(n) = name {
            out.extend(library_for_name(&n));
        }
    };
    for (_, e) in unit_exprs(unit) {
        visit(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::parse_unit;

    fn libs(src: &str) -> BTreeSet<LibraryId> {
        detect_libraries(&parse_unit(src, "A.java"))
    }

    #[test]
    fn import_mapping() {
        assert_eq!(
            libs("import okhttp3.OkHttpClient; class A {}"),
            BTreeSet::from([LibraryId::OkHttp])
        );
        assert_eq!(
            libs("import java.net.HttpURLConnection; import retrofit2.http.GET; class A {}"),
            BTreeSet::from([LibraryId::JavaNetHttpUrlConnection, LibraryId::Retrofit])
        );
        assert!(libs("import java.util.List; class A {}").is_empty());
        assert_eq!(
            libs("import javax.net.ssl.HttpsURLConnection; import java.net.*; class A {}"),
            BTreeSet::from([LibraryId::JavaNetUrlConnection, LibraryId::JavaNetHttpsUrlConnection])
        );
    }

    #[test]
    fn qualified_receivers() {
        let l = libs(
            r#"class A { void m() {
                java.net.URL u = new java.net.URL("http://a");
                com.bumptech.glide.Glide.with(this).load("http://b");
            } }"#,
        );
        assert_eq!(l, BTreeSet::from([LibraryId::JavaNetUrlConnection, LibraryId::Glide]));
    }
}
