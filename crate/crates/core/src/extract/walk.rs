use std::collections::{HashMap, HashSet};

use crate::source::{build_scope, build_type_scope, Expr, ExprKind, MethodDecl, Scope, SourceUnit, StmtKind, TypeDecl};

/// One analyzable region: a method body, or a type's field initializers.
pub(crate) struct Body<'a> {
    pub ty: &'a TypeDecl,
    pub method: Option<&'a MethodDecl>,
    pub scope: Scope,
    /// Every expression, pre-order.
    pub exprs: Vec<&'a Expr>,
    /// Variable a top-level expression is assigned to.
    pub binders: HashMap<*const Expr, String>,
}

impl<'a> Body<'a> {
    /// Method calls that are not the receiver of another call.
    pub fn chain_tops(&self) -> Vec<&'a Expr> {
        let mut receivers: HashSet<*const Expr> = HashSet::new();
        for e in &self.exprs {
            if let ExprKind::MethodCall { receiver: Some(r), .. } = &e.kind {
                if matches!(r.kind, ExprKind::MethodCall { .. }) {
                    receivers.insert(&**r as *const Expr);
                }
            }
        }
        self.exprs
            .iter()
            .copied()
            .filter(|e| matches!(e.kind, ExprKind::MethodCall { .. }))
            .filter(|e| !receivers.contains(&(*e as *const Expr)))
            .collect()
    }

    pub fn binder(&self, e: &Expr) -> Option<&str> {
        self.binders.get(&(e as *const Expr)).map(String::as_str)
    }

    pub fn method_name(&self) -> Option<&'a str> {
        self.method.map(|m| m.name.as_str())
    }
}

fn target_var(target: &Expr) -> Option<String> {
    match &target.kind {
        ExprKind::NameRef(n) => Some(n.clone()),
        ExprKind::FieldAccess { receiver, name } if matches!(&receiver.kind, ExprKind::NameRef(r) if r == "this") => {
            Some(name.clone())
        }
        _ => None,
    }
}

pub(crate) fn bodies(unit: &SourceUnit) -> Vec<Body<'_>> {
    let mut out = Vec::new();
    for ty in &unit.types {
        let mut exprs = Vec::new();
        let mut binders = HashMap::new();
        for f in &ty.fields {
            if let Some(init) = &f.initializer {
                binders.insert(init as *const Expr, f.name.clone());
                init.walk(&mut |e| exprs.push(e));
            }
        }
        out.push(Body {
            ty,
            method: None,
            scope: build_type_scope(ty),
            exprs,
            binders,
        });
        for m in &ty.methods {
            let Some(stmts) = &m.body else { continue };
            let mut exprs = Vec::new();
            let mut binders = HashMap::new();
            for s in stmts {
                s.walk_stmts(&mut |s| match &s.kind {
                    StmtKind::LocalDecl {
                        name, init: Some(e), ..
                    } => {
                        binders.insert(e as *const Expr, name.clone());
                    }
                    StmtKind::Assign { target, value, .. } => {
                        if let Some(n) = target_var(target) {
                            binders.insert(value as *const Expr, n);
                        }
                    }
                    _ => {}
                });
                s.walk_exprs(&mut |e| exprs.push(e));
            }
            out.push(Body {
                ty,
                method: Some(m),
                scope: build_scope(m, ty),
                exprs,
                binders,
            });
        }
    }
    out
}

/// Every expression in the unit with the index of its body.
pub(crate) fn unit_exprs(unit: &SourceUnit) -> Vec<(usize, &Expr)> {
    let mut out = Vec::new();
    let mut idx = 0;
    for ty in &unit.types {
        for f in &ty.fields {
            if let Some(init) = &f.initializer {
                init.walk(&mut |e| out.push((idx, e)));
            }
        }
        idx += 1;
        for m in &ty.methods {
            if let Some(stmts) = &m.body {
                for s in stmts {
                    s.walk_exprs(&mut |e| out.push((idx, e)));
                }
                idx += 1;
            }
        }
    }
    out
}

/// Simple name of a possibly qualified type.
pub(crate) fn simple(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

/// `X.class` → `X`.
pub(crate) fn class_literal(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::FieldAccess { receiver, name } if name == "class" => match &receiver.kind {
            ExprKind::NameRef(n) => Some(n.as_str()),
            ExprKind::FieldAccess { name, .. } => Some(name.as_str()),
            _ => None,
        },
        _ => None,
    }
}

/// Name and arguments of a method call.
pub(crate) fn call_parts(e: &Expr) -> Option<(&str, &[Expr])> {
    match &e.kind {
        ExprKind::MethodCall { name, args, .. } => Some((name.as_str(), args.as_slice())),
        _ => None,
    }
}
