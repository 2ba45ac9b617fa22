#include "libwrap/decl.hpp"

namespace libwrap {

namespace {

std::string qualifier_prefix(const TypeExpr& t) {
    std::string out;
    if (t.is_const) out += "const ";
    if (t.is_volatile) out += "volatile ";
    return out;
}

std::string pointer_qualifiers(const TypeExpr& t) {
    std::string out;
    if (t.is_const) out += " const";
    if (t.is_volatile) out += " volatile";
    if (t.is_restrict) out += " __restrict";
    return out;
}

std::string param_list(const std::vector<std::string>& params, bool variadic, bool unprototyped) {
    if (unprototyped) return "()";
    std::string out = "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i != 0) out += ", ";
        out += params[i];
    }
    if (variadic) out += params.empty() ? "..." : ", ...";
    if (params.empty() && !variadic) out += "void";
    return out + ")";
}

// Classic inside-out rendering: `inner` is the partially built declarator.
std::string render(const TypeExpr& t, const std::string& inner) {
    using Kind = TypeExpr::Kind;
    switch (t.kind) {
    case Kind::scalar:
    case Kind::record_or_enum_ref:
    case Kind::typedef_ref: {
        std::string out = qualifier_prefix(t) + t.base;
        if (!inner.empty()) out += " " + inner;
        return out;
    }
    case Kind::pointer_to: {
        std::string quals = pointer_qualifiers(t);
        std::string decl = "*" + (quals.empty() ? "" : quals.substr(1));
        if (!inner.empty()) decl += (quals.empty() ? "" : " ") + inner;
        const TypeExpr& pointee = t.pointee();
        if (pointee.kind == Kind::array_of || pointee.kind == Kind::function_type) decl = "(" + decl + ")";
        return render(pointee, decl);
    }
    case Kind::array_of: {
        std::string suffix = "[";
        std::string quals = pointer_qualifiers(t);
        if (!quals.empty()) suffix += quals.substr(1);
        if (t.extent) suffix += (quals.empty() ? "" : " ") + std::to_string(*t.extent);
        suffix += "]";
        return render(t.element(), inner + suffix);
    }
    case Kind::function_type: {
        std::vector<std::string> params;
        for (std::size_t i = 1; i < t.children.size(); ++i) params.push_back(render(t.children[i], ""));
        return render(t.return_type(), inner + param_list(params, t.variadic, t.unprototyped));
    }
    }
    return {};
}

}  // namespace

TypeExpr TypeExpr::scalar(std::string spelling) {
    TypeExpr t;
    t.kind = Kind::scalar;
    t.base = std::move(spelling);
    return t;
}

TypeExpr TypeExpr::record(std::string spelling) {
    TypeExpr t;
    t.kind = Kind::record_or_enum_ref;
    t.base = std::move(spelling);
    return t;
}

TypeExpr TypeExpr::typedef_name(std::string name) {
    TypeExpr t;
    t.kind = Kind::typedef_ref;
    t.base = std::move(name);
    return t;
}

TypeExpr TypeExpr::pointer(TypeExpr pointee) {
    TypeExpr t;
    t.kind = Kind::pointer_to;
    t.children.push_back(std::move(pointee));
    return t;
}

TypeExpr TypeExpr::array(TypeExpr element, std::optional<std::uint64_t> extent) {
    TypeExpr t;
    t.kind = Kind::array_of;
    t.children.push_back(std::move(element));
    t.extent = extent;
    return t;
}

TypeExpr TypeExpr::function(TypeExpr ret, std::vector<TypeExpr> params, bool variadic) {
    TypeExpr t;
    t.kind = Kind::function_type;
    t.children.push_back(std::move(ret));
    for (auto& p : params) t.children.push_back(std::move(p));
    t.variadic = variadic;
    return t;
}

std::string TypeExpr::canonical() const { return render(*this, ""); }

std::string TypeExpr::declare(const std::string& name) const { return render(*this, name); }

TypeExpr TypeExpr::unqualified() const {
    TypeExpr t = *this;
    t.is_const = t.is_volatile = t.is_restrict = false;
    return t;
}

TypeExpr FunctionDecl::type() const {
    std::vector<TypeExpr> param_types;
    for (const auto& p : params) param_types.push_back(p.type);
    TypeExpr t = TypeExpr::function(return_type, std::move(param_types), variadic);
    t.unprototyped = empty_parens_unknown_args;
    return t;
}

std::string FunctionDecl::prototype(const std::string& rendered_name,
                                    const std::vector<std::string>& param_names, bool as_void) const {
    std::vector<std::string> rendered;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::string pname;
        if (i < param_names.size()) {
            pname = param_names[i];
        } else if (params[i].name) {
            pname = *params[i].name;
        }
        rendered.push_back(params[i].type.declare(pname));
    }
    bool unknown = empty_parens_unknown_args && !as_void;
    return render(return_type, rendered_name + param_list(rendered, variadic, unknown));
}

}  // namespace libwrap
