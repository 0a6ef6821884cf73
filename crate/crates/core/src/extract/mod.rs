//! Library detection and per-library extraction of URLs and JSON schemas.

mod detect;
mod endpoints;
mod json;
mod retrofit;
mod walk;

use std::borrow::Cow;
use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use crate::model::{ExtractionSite, JsonSchema, LibraryId, WebApiUrl};
use crate::reconstruct::{
    candidate_pool, CandidatePool, Reconstructor, ResolutionBudget, SimilarityConfig, StringValue,
    DEFAULT_MAX_ITERATIONS,
};
use crate::source::{Expr, ExprKind, Scope, SourceUnit, Span, TypeDecl};

pub use detect::{detect_libraries, library_for_name};
pub use retrofit::RetrofitBase;

use walk::Body;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub resolution_limit: usize,
    pub similarity: SimilarityConfig,
    /// Guess unresolved names from declarations anywhere in the app rather
    /// than only the same file.
    pub corpus_candidates: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            resolution_limit: DEFAULT_MAX_ITERATIONS,
            similarity: SimilarityConfig::default(),
            corpus_candidates: false,
        }
    }
}

/// App-wide facts gathered in one pass before per-file extraction:
/// candidate pools, type declarations, Retrofit base URLs and classes bound
/// to JSON adapters.
pub struct CorpusScope<'a> {
    options: ExtractOptions,
    pools: HashMap<PathBuf, CandidatePool>,
    corpus_pool: Option<CandidatePool>,
    types: HashMap<&'a str, Vec<(&'a SourceUnit, &'a TypeDecl)>>,
    retrofit_bases: Vec<RetrofitBase>,
    json_bound: BTreeMap<String, LibraryId>,
}

impl<'a> CorpusScope<'a> {
    pub fn new(units: &'a [SourceUnit], options: ExtractOptions) -> Self {
        let mut pools = HashMap::new();
        let mut types: HashMap<&str, Vec<_>> = HashMap::new();
        for u in units {
            pools.insert(u.path.clone(), candidate_pool(u, options.resolution_limit));
            for t in &u.types {
                types.entry(t.name.as_str()).or_default().push((u, t));
            }
        }
        let corpus_pool = options.corpus_candidates.then(|| {
            let mut all = CandidatePool::new();
            for u in units {
                for (k, v) in &pools[&u.path] {
                    all.entry(k.clone()).or_insert_with(|| v.clone());
                }
            }
            all
        });
        let mut scope = CorpusScope {
            options,
            pools,
            corpus_pool,
            types,
            retrofit_bases: Vec::new(),
            json_bound: BTreeMap::new(),
        };
        let mut bases = Vec::new();
        let mut bound = Vec::new();
        for u in units {
            let ctx = Ctx::new(u, &scope);
            if ctx.has(LibraryId::Retrofit) {
                bases.extend(retrofit::collect_bases(&ctx));
            }
            bound.extend(json::bound_classes(&ctx));
        }
        scope.retrofit_bases = bases;
        for (name, lib) in bound {
            scope.json_bound.entry(name).or_insert(lib);
        }
        scope
    }

    pub fn options(&self) -> &ExtractOptions {
        &self.options
    }

    pub fn retrofit_bases(&self) -> &[RetrofitBase] {
        &self.retrofit_bases
    }

    /// First declaration of a type with this simple name, in unit order.
    pub fn find_type(&self, name: &str) -> Option<(&'a SourceUnit, &'a TypeDecl)> {
        self.types.get(name).and_then(|v| v.first().copied())
    }

    fn pool_for(&self, unit: &SourceUnit) -> Cow<'_, CandidatePool> {
        if let Some(p) = &self.corpus_pool {
            return Cow::Borrowed(p);
        }
        match self.pools.get(&unit.path) {
            Some(p) => Cow::Borrowed(p),
            None => Cow::Owned(candidate_pool(unit, self.options.resolution_limit)),
        }
    }
}

/// Per-file extraction state.
pub(crate) struct Ctx<'a> {
    pub unit: &'a SourceUnit,
    pub corpus: &'a CorpusScope<'a>,
    pub libs: BTreeSet<LibraryId>,
    pool: Cow<'a, CandidatePool>,
    exhausted: Cell<bool>,
}

impl<'a> Ctx<'a> {
    fn new(unit: &'a SourceUnit, corpus: &'a CorpusScope<'a>) -> Self {
        Ctx {
            unit,
            corpus,
            libs: detect_libraries(unit),
            pool: corpus.pool_for(unit),
            exhausted: Cell::new(false),
        }
    }

    pub fn has(&self, lib: LibraryId) -> bool {
        self.libs.contains(&lib)
    }

    pub fn value(&self, e: &Expr, scope: &Scope) -> StringValue {
        let mut budget = ResolutionBudget::new(self.corpus.options.resolution_limit);
        let v = Reconstructor::new(scope)
            .with_candidates(&self.pool, self.corpus.options.similarity)
            .reconstruct(e, &mut budget);
        if budget.exhausted() {
            self.exhausted.set(true);
        }
        v
    }

    pub fn site(&self, lib: LibraryId, body: &Body, span: Span, raw: Option<&Expr>) -> ExtractionSite {
        let mut s = ExtractionSite::new(lib, self.unit.path.clone(), body.ty.name.clone());
        s.method_name = body.method_name().map(str::to_string);
        s.span = span;
        s.raw_expr = raw.cloned();
        s
    }
}

/// Everything extracted from one file.
#[derive(Debug, Clone, Default)]
pub struct UnitExtraction {
    pub libraries: BTreeSet<LibraryId>,
    pub urls: Vec<WebApiUrl>,
    pub schemas: Vec<JsonSchema>,
    /// Some value was cut short by the resolution budget.
    pub budget_exhausted: bool,
}

pub fn extract_unit(unit: &SourceUnit, corpus: &CorpusScope) -> UnitExtraction {
    let ctx = Ctx::new(unit, corpus);
    let mut urls = endpoints::extract(&ctx);
    urls.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut schemas = json::extract(&ctx);
    schemas.sort_by(|a, b| a.provenance.cmp(&b.provenance));
    UnitExtraction {
        libraries: ctx.libs.clone(),
        urls,
        schemas,
        budget_exhausted: ctx.exhausted.get(),
    }
}

pub fn extract_endpoints(unit: &SourceUnit, corpus: &CorpusScope) -> Vec<WebApiUrl> {
    extract_unit(unit, corpus).urls
}

pub fn extract_json_schemas(unit: &SourceUnit, corpus: &CorpusScope) -> Vec<JsonSchema> {
    extract_unit(unit, corpus).schemas
}

/// Every string literal in the unit with its span, in source order.
pub fn string_literals(unit: &SourceUnit) -> Vec<(Span, String)> {
    let mut out: Vec<(Span, String)> = walk::unit_exprs(unit)
        .into_iter()
        .filter_map(|(_, e)| match &e.kind {
            ExprKind::StringLiteral(s) => Some((e.span, s.clone())),
            _ => None,
        })
        .collect();
    out.sort_by_key(|(s, _)| s.start);
    out
}
