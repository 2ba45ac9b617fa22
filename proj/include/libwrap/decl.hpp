#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace libwrap {

// Structural C type as written in a declaration, with typedef names kept.
//
// Leaf kinds carry their spelling in `base` ("unsigned long", "struct pt",
// "size_t"). Derived kinds keep their operands in `children`:
//   pointer_to     -> [pointee]
//   array_of       -> [element]
//   function_type  -> [return, param...]
struct TypeExpr {
    enum class Kind { scalar, record_or_enum_ref, typedef_ref, pointer_to, function_type, array_of };

    Kind kind = Kind::scalar;
    std::string base;
    bool is_const = false;
    bool is_volatile = false;
    bool is_restrict = false;
    std::vector<TypeExpr> children;
    bool variadic = false;      // function_type: trailing `...`
    bool unprototyped = false;  // function_type: written as `()`
    std::optional<std::uint64_t> extent;  // array_of

    static TypeExpr scalar(std::string spelling);
    static TypeExpr record(std::string spelling);
    static TypeExpr typedef_name(std::string name);
    static TypeExpr pointer(TypeExpr pointee);
    static TypeExpr array(TypeExpr element, std::optional<std::uint64_t> extent);
    static TypeExpr function(TypeExpr ret, std::vector<TypeExpr> params, bool variadic);

    bool is_void() const { return kind == Kind::scalar && base == "void" && !is_const && !is_volatile; }
    bool is_leaf() const {
        return kind == Kind::scalar || kind == Kind::record_or_enum_ref || kind == Kind::typedef_ref;
    }
    const TypeExpr& pointee() const { return children.at(0); }
    const TypeExpr& element() const { return children.at(0); }
    const TypeExpr& return_type() const { return children.at(0); }

    // Abstract declarator spelling, e.g. "void (*)(int, const char *)".
    std::string canonical() const;
    // Full declaration of `name` with this type, e.g. "void (*cb)(int)".
    std::string declare(const std::string& name) const;

    // Same type with top-level qualifiers removed.
    TypeExpr unqualified() const;

    bool operator==(const TypeExpr&) const = default;
};

struct SourceLocation {
    std::string file;
    int line = 0;

    bool operator==(const SourceLocation&) const = default;
};

struct Parameter {
    std::optional<std::string> name;
    TypeExpr type;

    bool operator==(const Parameter&) const = default;
};

struct FunctionDecl {
    std::string name;
    TypeExpr return_type;
    std::vector<Parameter> params;
    bool variadic = false;
    bool empty_parens_unknown_args = false;
    bool is_inline_or_static = false;
    // `static` (with or without inline): no symbol can exist outside the TU.
    bool internal_linkage = false;
    // `__asm__("sym")` renames the link symbol.
    std::optional<std::string> asm_label;
    SourceLocation location;

    // The function's own type (params without names).
    TypeExpr type() const;

    // Prototype text, optionally with replacement parameter names and a
    // replacement function name. An empty-parens decl renders as `name()`
    // unless `as_void` is set, in which case `(void)` is written.
    std::string prototype(const std::string& rendered_name,
                          const std::vector<std::string>& param_names = {},
                          bool as_void = false) const;
    std::string prototype() const { return prototype(name); }

    bool operator==(const FunctionDecl&) const = default;
};

}  // namespace libwrap
