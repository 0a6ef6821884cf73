use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{guess_value, PlaceholderKind, SimilarityConfig, StringValue};
use crate::source::{
    build_scope, build_type_scope, AssignOp, DeclKind, Declaration, DeclaredType, Expr, ExprKind, Scope, SourceUnit,
};

pub const DEFAULT_MAX_ITERATIONS: usize = 15;

/// Resolved declarations available to similarity guessing, keyed by name.
pub type CandidatePool = BTreeMap<String, StringValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolutionBudget {
    pub max_iterations: usize,
    pub iterations_used: usize,
    #[serde(skip)]
    starved: bool,
}

impl Default for ResolutionBudget {
    fn default() -> Self {
        ResolutionBudget::new(DEFAULT_MAX_ITERATIONS)
    }
}

impl ResolutionBudget {
    pub fn new(max_iterations: usize) -> Self {
        ResolutionBudget {
            max_iterations,
            iterations_used: 0,
            starved: false,
        }
    }

    /// Consumes one step; false once the budget is spent.
    pub fn step(&mut self) -> bool {
        if self.iterations_used < self.max_iterations {
            self.iterations_used += 1;
            true
        } else {
            self.starved = true;
            false
        }
    }

    /// A lookup was refused because the budget was spent.
    pub fn exhausted(&self) -> bool {
        self.starved
    }
}

/// Reconstructs `expr` without similarity guessing.
pub fn reconstruct(expr: &Expr, scope: &Scope, budget: &mut ResolutionBudget) -> StringValue {
    Reconstructor::new(scope).reconstruct(expr, budget)
}

pub struct Reconstructor<'a> {
    scope: &'a Scope,
    candidates: Option<&'a CandidatePool>,
    similarity: SimilarityConfig,
}

impl<'a> Reconstructor<'a> {
    pub fn new(scope: &'a Scope) -> Self {
        Reconstructor {
            scope,
            candidates: None,
            similarity: SimilarityConfig::default(),
        }
    }

    pub fn with_candidates(mut self, pool: &'a CandidatePool, cfg: SimilarityConfig) -> Self {
        self.candidates = Some(pool);
        self.similarity = cfg;
        self
    }

    pub fn reconstruct(&self, expr: &Expr, budget: &mut ResolutionBudget) -> StringValue {
        self.value_of(expr, expr.span.start, budget)
    }

    /// Value of `expr` as evaluated at source position `at`.
    fn value_of(&self, expr: &Expr, at: usize, budget: &mut ResolutionBudget) -> StringValue {
        match &expr.kind {
            ExprKind::StringLiteral(s) => StringValue::literal(s.clone()),
            ExprKind::NumberLiteral { text, .. } => StringValue::literal(number_text(text)),
            ExprKind::BoolLiteral(b) => StringValue::literal(b.to_string()),
            ExprKind::NullLiteral => StringValue::placeholder(PlaceholderKind::Null, None),
            ExprKind::NameRef(n) => self.resolve_name(n, at, false, budget),
            ExprKind::FieldAccess { receiver, name } => {
                let own_type = match &receiver.kind {
                    ExprKind::NameRef(r) => r == "this" || r == self.scope.type_name(),
                    _ => false,
                };
                if own_type {
                    self.resolve_name(name, at, true, budget)
                } else {
                    self.unresolved_string(name)
                }
            }
            ExprKind::Concat(l, r) => self.value_of(l, at, budget).concat(self.value_of(r, at, budget)),
            ExprKind::MethodCall { receiver, name, args } => {
                self.call_value(receiver.as_deref(), name, args, at, budget)
            }
            ExprKind::New { type_name, args, .. } => {
                let simple = type_name.rsplit('.').next().unwrap_or(type_name);
                match simple {
                    "StringBuilder" | "StringBuffer" | "String" | "URL" | "URI" => {
                        let mut v = StringValue::new();
                        for a in args.iter().take(2) {
                            if let ExprKind::NumberLiteral { .. } = a.kind {
                                continue;
                            }
                            v.append(self.value_of(a, at, budget));
                        }
                        v
                    }
                    _ => StringValue::placeholder(PlaceholderKind::String, None),
                }
            }
            ExprKind::Binary { op, .. } => match op.as_str() {
                "==" | "!=" | "<" | ">" | "<=" | ">=" | "&&" | "||" | "instanceof" => StringValue::literal("true"),
                _ => StringValue::literal("0"),
            },
            ExprKind::Assign { value, .. } => self.value_of(value, at, budget),
            ExprKind::ArrayInit(_) | ExprKind::Lambda(_) | ExprKind::Unknown(_) => {
                StringValue::placeholder(PlaceholderKind::String, None)
            }
        }
    }

    fn call_value(
        &self,
        receiver: Option<&Expr>,
        name: &str,
        args: &[Expr],
        at: usize,
        budget: &mut ResolutionBudget,
    ) -> StringValue {
        let recv_name = receiver.and_then(|r| r.qualified_name());
        let recv_simple = recv_name.as_deref().map(|n| n.rsplit('.').next().unwrap_or(n));
        match (name, receiver, args) {
            ("toString" | "trim" | "intern", Some(r), []) => self.value_of(r, at, budget),
            ("valueOf" | "copyValueOf", _, [a]) if recv_simple == Some("String") => self.value_of(a, at, budget),
            ("parse" | "create" | "get", _, [a])
                if matches!(recv_simple, Some("Uri" | "URI" | "HttpUrl" | "Paths")) =>
            {
                self.value_of(a, at, budget)
            }
            ("append" | "concat", Some(r), [a]) => self.value_of(r, at, budget).concat(self.value_of(a, at, budget)),
            _ => StringValue::placeholder(PlaceholderKind::String, None),
        }
    }

    fn resolve_name(&self, name: &str, at: usize, field_only: bool, budget: &mut ResolutionBudget) -> StringValue {
        let decl = if field_only {
            self.scope.lookup_field(name)
        } else {
            self.scope.lookup(name)
        };
        let Some(decl) = decl else {
            return self.unresolved_string(name);
        };
        if !budget.step() {
            return StringValue::placeholder(kind_of(&decl.declared_type), Some(name.to_string()));
        }
        let Some(assignment) = self.scope.reaching_assignment(decl, at) else {
            return self.default_for(decl);
        };
        let mut value = match assignment.op {
            AssignOp::Set => self.value_of(&assignment.value, assignment.pos, budget),
            AssignOp::Add => {
                let before = self.resolve_name(name, assignment.pos, field_only, budget);
                before.concat(self.value_of(&assignment.value, assignment.pos, budget))
            }
            AssignOp::Other => StringValue::literal("0"),
        };
        if is_builder(&decl.type_name) {
            for inv in self.scope.invocations_between(decl, assignment.pos, at) {
                for call in inv.call.call_chain() {
                    if let ExprKind::MethodCall { name, args, .. } = &call.kind {
                        if name == "append" && args.len() == 1 {
                            value.append(self.value_of(&args[0], inv.pos, budget));
                        }
                    }
                }
            }
        }
        if !value.is_resolved() {
            match decl.declared_type {
                DeclaredType::NumberInt | DeclaredType::NumberFloat => return StringValue::literal("0"),
                DeclaredType::Boolean => return StringValue::literal("true"),
                _ => {}
            }
        }
        value
    }

    fn default_for(&self, decl: &Declaration) -> StringValue {
        match decl.declared_type {
            DeclaredType::NumberInt | DeclaredType::NumberFloat => StringValue::literal("0"),
            DeclaredType::Boolean => StringValue::literal("true"),
            _ if is_builder(&decl.type_name) && decl.kind == DeclKind::Local => StringValue::new(),
            _ => self.unresolved_string(&decl.name),
        }
    }

    fn unresolved_string(&self, name: &str) -> StringValue {
        self.candidates
            .and_then(|pool| guess_value(name, pool, &self.similarity))
            .unwrap_or_else(|| StringValue::placeholder(PlaceholderKind::String, Some(name.to_string())))
    }
}

fn kind_of(t: &DeclaredType) -> PlaceholderKind {
    match t {
        DeclaredType::NumberInt => PlaceholderKind::NumberInt,
        DeclaredType::NumberFloat => PlaceholderKind::Number,
        DeclaredType::Boolean => PlaceholderKind::Boolean,
        _ => PlaceholderKind::String,
    }
}

fn is_builder(type_name: &str) -> bool {
    matches!(
        type_name.rsplit('.').next().unwrap_or(type_name),
        "StringBuilder" | "StringBuffer"
    )
}

/// Java literal text to the string it prints as: `10L` → `10`, `0x1F` → `31`.
pub fn number_text(text: &str) -> String {
    let t = text.replace('_', "");
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b.to_string()),
        None => (false, t.clone()),
    };
    let lower = body.to_ascii_lowercase();
    let parsed = if let Some(hex) = lower.strip_prefix("0x") {
        i128::from_str_radix(hex.trim_end_matches('l'), 16)
            .ok()
            .map(|v| v.to_string())
    } else if let Some(bin) = lower.strip_prefix("0b") {
        i128::from_str_radix(bin.trim_end_matches('l'), 2)
            .ok()
            .map(|v| v.to_string())
    } else {
        Some(lower.trim_end_matches(['l', 'f', 'd']).to_string())
    };
    let digits = parsed.unwrap_or(body);
    if neg {
        format!("-{digits}")
    } else {
        digits
    }
}

/// Fully resolved string-like declarations of one unit, first occurrence
/// in source order winning.
pub fn candidate_pool(unit: &SourceUnit, max_iterations: usize) -> CandidatePool {
    let mut pool = CandidatePool::new();
    let mut consider = |scope: &Scope, decl: &Declaration, at: usize| {
        if pool.contains_key(&decl.name)
            || !matches!(decl.declared_type, DeclaredType::String | DeclaredType::Unknown)
            || decl.assignments.is_empty()
        {
            return;
        }
        let mut budget = ResolutionBudget::new(max_iterations);
        let v = Reconstructor::new(scope).value_of(&name_ref(&decl.name), at, &mut budget);
        if v.is_resolved() && !v.is_empty() {
            pool.insert(decl.name.clone(), v);
        }
    };
    for ty in &unit.types {
        let type_scope = build_type_scope(ty);
        let mut fields: Vec<&Declaration> = type_scope
            .declarations()
            .filter(|d| d.kind == DeclKind::Field)
            .collect();
        fields.sort_by_key(|d| d.span.start);
        for d in fields {
            consider(&type_scope, d, usize::MAX);
        }
        for m in &ty.methods {
            let scope = build_scope(m, ty);
            let mut locals: Vec<&Declaration> = scope.declarations().filter(|d| d.kind != DeclKind::Field).collect();
            locals.sort_by_key(|d| d.span.start);
            for d in locals {
                consider(&scope, d, m.span.end.saturating_sub(1));
            }
        }
    }
    pool
}

fn name_ref(name: &str) -> Expr {
    Expr::new(ExprKind::NameRef(name.to_string()), Default::default())
}
