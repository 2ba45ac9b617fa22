#include "libwrap/declscan.hpp"

#include "c_lexer.hpp"
#include "libwrap/error.hpp"

#include <map>
#include <memory>
#include <set>
#include <unordered_map>

namespace libwrap {

using detail::Token;

namespace {

const std::set<std::string, std::less<>> storage_keywords = {
    "typedef", "extern", "static", "auto", "register", "_Thread_local", "__thread"};

const std::set<std::string, std::less<>> inline_keywords = {
    "inline", "__inline", "__inline__", "_Noreturn", "__forceinline"};

const std::set<std::string, std::less<>> const_keywords = {"const", "__const", "__const__"};
const std::set<std::string, std::less<>> volatile_keywords = {"volatile", "__volatile", "__volatile__"};
const std::set<std::string, std::less<>> restrict_keywords = {"restrict", "__restrict", "__restrict__"};

const std::set<std::string, std::less<>> scalar_keywords = {
    "void",     "char",     "short",     "int",       "long",      "float",      "double",
    "signed",   "__signed", "__signed__", "unsigned", "_Bool",     "_Complex",   "__complex__",
    "__int128", "_Float16", "_Float32",  "_Float64",  "_Float128", "_Float32x",  "_Float64x",
    "_Float128x", "__float128", "__float80", "__fp16", "__bf16", "_Decimal32", "_Decimal64",
    "_Decimal128"};

const std::set<std::string, std::less<>> asm_keywords = {"__asm__", "__asm", "asm"};

bool is_qualifier(const std::string& w) {
    return const_keywords.contains(w) || volatile_keywords.contains(w) || restrict_keywords.contains(w);
}

struct Qualifiers {
    bool is_const = false;
    bool is_volatile = false;
    bool is_restrict = false;

    void apply(TypeExpr& t) const {
        t.is_const = t.is_const || is_const;
        t.is_volatile = t.is_volatile || is_volatile;
        t.is_restrict = t.is_restrict || is_restrict;
    }
};

struct DeclSpecs {
    bool is_typedef = false;
    bool is_extern = false;
    bool is_static = false;
    bool is_inline = false;
    TypeExpr base;
};

struct Declarator;

struct Suffix {
    bool is_function = false;
    // array
    Qualifiers array_qualifiers;
    std::optional<std::uint64_t> extent;
    // function
    std::vector<Parameter> params;
    bool variadic = false;
    bool unprototyped = false;
};

struct Declarator {
    std::vector<Qualifiers> pointers;
    std::optional<std::string> name;
    const Token* name_token = nullptr;
    std::unique_ptr<Declarator> nested;
    std::vector<Suffix> suffixes;
};

struct Resolved {
    std::optional<std::string> name;
    const Token* name_token = nullptr;
    TypeExpr type;
    // The declared entity's outermost type constructor when it is a
    // function suffix; carries the parameter names.
    const Suffix* function_suffix = nullptr;
};

std::optional<std::uint64_t> parse_integer_literal(const std::string& text) {
    std::string digits = text;
    while (!digits.empty() && (digits.back() == 'u' || digits.back() == 'U' || digits.back() == 'l' ||
                               digits.back() == 'L')) {
        digits.pop_back();
    }
    if (digits.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        std::uint64_t value = std::stoull(digits, &used, 0);
        if (used != digits.size()) return std::nullopt;
        return value;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Parameter type adjustment: arrays and functions decay to pointers.
TypeExpr adjust_parameter(TypeExpr t) {
    if (t.kind == TypeExpr::Kind::array_of) {
        TypeExpr p = TypeExpr::pointer(t.element());
        p.is_const = t.is_const;
        p.is_volatile = t.is_volatile;
        p.is_restrict = t.is_restrict;
        return p;
    }
    if (t.kind == TypeExpr::Kind::function_type) return TypeExpr::pointer(std::move(t));
    return t;
}

class Parser {
public:
    explicit Parser(detail::LexedSource lexed) : lexed_(std::move(lexed)) {
        typedefs_.emplace("__builtin_va_list", TypeExpr::typedef_name("__builtin_va_list"));
    }

    std::vector<FunctionDecl> run() {
        while (!at_end()) external_declaration();
        return std::move(decls_);
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& tok(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, lexed_.tokens.size() - 1);
        return lexed_.tokens[i];
    }
    bool at_end() const { return tok().kind == Token::Kind::end; }
    const Token& advance() {
        const Token& t = tok();
        if (!at_end()) ++pos_;
        return t;
    }
    bool accept(std::string_view s) {
        if (tok().is(s)) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(lexed_.files.at(at.file), at.line, at.text, message);
    }
    void expect(std::string_view s) {
        if (!accept(s)) fail(tok(), "expected '" + std::string(s) + "'");
    }
    bool is_typedef_name(const Token& t) const {
        return t.kind == Token::Kind::identifier && typedefs_.contains(t.text);
    }
    bool starts_type(const Token& t) const {
        if (t.kind != Token::Kind::identifier) return false;
        const std::string& w = t.text;
        return scalar_keywords.contains(w) || is_qualifier(w) || storage_keywords.contains(w) ||
               inline_keywords.contains(w) || w == "struct" || w == "union" || w == "enum" ||
               is_typedef_name(t) || w == "_Atomic" || w == "__typeof__" || w == "typeof" ||
               w == "__typeof";
    }

    // Skips a balanced group starting at the current opening token.
    void skip_balanced(std::string_view open, std::string_view close) {
        const Token& start = tok();
        int depth = 0;
        do {
            if (at_end()) fail(start, "unbalanced '" + std::string(open) + "'");
            if (tok().is(open)) ++depth;
            if (tok().is(close)) --depth;
            advance();
        } while (depth > 0);
    }

    // Skips to (not past) a `,` or `;` outside any brackets.
    void skip_initializer() {
        int depth = 0;
        while (!at_end()) {
            const Token& t = tok();
            if (depth == 0 && (t.is(",") || t.is(";"))) return;
            if (t.is("(") || t.is("[") || t.is("{")) ++depth;
            if (t.is(")") || t.is("]") || t.is("}")) --depth;
            advance();
        }
    }

    void skip_statement() {
        while (!at_end() && !tok().is(";")) {
            if (tok().is("(")) {
                skip_balanced("(", ")");
            } else if (tok().is("{")) {
                skip_balanced("{", "}");
            } else {
                advance();
            }
        }
        accept(";");
    }

    // ---- declarations --------------------------------------------------

    void external_declaration() {
        if (accept(";")) return;
        const Token& first = tok();
        if (first.is("_Static_assert") || first.is("static_assert") || asm_keywords.contains(first.text)) {
            skip_statement();
            return;
        }

        DeclSpecs specs = declaration_specifiers(false);
        if (accept(";")) return;

        while (true) {
            Declarator d = declarator(false);
            Resolved r = resolve(d, specs.base);
            std::optional<std::string> asm_label = asm_name();

            const TypeExpr* function = function_type_of(r.type);
            if (specs.is_typedef) {
                typedefs_[*r.name] = r.type;
            } else if (function != nullptr) {
                record(specs, r, *function, asm_label);
            }

            if (tok().is("{")) {
                if (function == nullptr || specs.is_typedef) fail(tok(), "unexpected '{'");
                skip_balanced("{", "}");
                return;  // function definition ends the declaration
            }
            if (accept("=")) skip_initializer();
            if (accept(",")) continue;
            if (accept(";")) return;
            fail(tok(), "expected ';' or ',' after declarator");
        }
    }

    std::optional<std::string> asm_name() {
        if (!asm_keywords.contains(tok().text) || tok().kind != Token::Kind::identifier) return std::nullopt;
        advance();
        expect("(");
        std::string label;
        while (tok().kind == Token::Kind::string) {
            const std::string& s = advance().text;
            auto open = s.find('"');
            label += s.substr(open + 1, s.size() - open - 2);
        }
        expect(")");
        return label;
    }

    const TypeExpr* function_type_of(const TypeExpr& t) const {
        const TypeExpr* cur = &t;
        for (int depth = 0; depth < 64; ++depth) {
            if (cur->kind == TypeExpr::Kind::function_type) return cur;
            if (cur->kind != TypeExpr::Kind::typedef_ref) return nullptr;
            auto it = typedefs_.find(cur->base);
            if (it == typedefs_.end() || it->second == *cur) return nullptr;
            cur = &it->second;
        }
        return nullptr;
    }

    // A parameter whose typedef names an array or function type is adjusted
    // like a spelled-out one.
    TypeExpr decay_typedef(TypeExpr t) const {
        if (t.kind != TypeExpr::Kind::typedef_ref) return t;
        const TypeExpr* cur = &t;
        for (int depth = 0; depth < 64 && cur->kind == TypeExpr::Kind::typedef_ref; ++depth) {
            auto it = typedefs_.find(cur->base);
            if (it == typedefs_.end() || it->second == cur->unqualified()) return t;
            cur = &it->second;
        }
        if (cur->kind == TypeExpr::Kind::array_of) {
            TypeExpr element = cur->element();
            element.is_const |= t.is_const;
            element.is_volatile |= t.is_volatile;
            return TypeExpr::pointer(std::move(element));
        }
        if (cur->kind == TypeExpr::Kind::function_type) return TypeExpr::pointer(t.unqualified());
        return t;
    }

    DeclSpecs declaration_specifiers(bool in_parameter) {
        DeclSpecs specs;
        Qualifiers quals;
        std::map<std::string, int> counts;
        std::optional<TypeExpr> named;  // struct/union/enum or typedef name
        const Token& start = tok();
        bool any = false;

        while (tok().kind == Token::Kind::identifier) {
            const Token& t = tok();
            const std::string& w = t.text;
            if (storage_keywords.contains(w)) {
                if (w == "typedef") specs.is_typedef = true;
                if (w == "extern") specs.is_extern = true;
                if (w == "static") specs.is_static = true;
            } else if (inline_keywords.contains(w)) {
                if (w != "_Noreturn") specs.is_inline = true;
            } else if (const_keywords.contains(w)) {
                quals.is_const = true;
            } else if (volatile_keywords.contains(w)) {
                quals.is_volatile = true;
            } else if (restrict_keywords.contains(w)) {
                quals.is_restrict = true;
            } else if (w == "_Atomic") {
                fail(t, "_Atomic types are not supported");
            } else if (w == "typeof" || w == "__typeof__" || w == "__typeof") {
                fail(t, "typeof types are not supported");
            } else if (scalar_keywords.contains(w)) {
                if (named) fail(t, "conflicting type specifiers");
                std::string key = w;
                if (key == "__signed" || key == "__signed__") key = "signed";
                if (key == "__complex__") key = "_Complex";
                ++counts[key];
            } else if (w == "struct" || w == "union" || w == "enum") {
                if (named || !counts.empty()) fail(t, "conflicting type specifiers");
                named = tag_specifier();
                any = true;
                continue;
            } else if (!named && counts.empty() && is_typedef_name(t)) {
                named = TypeExpr::typedef_name(w);
            } else {
                break;
            }
            any = true;
            advance();
        }

        if (!any) fail(tok(), in_parameter ? "expected parameter type" : "expected a declaration");
        if (named) {
            specs.base = *named;
        } else if (!counts.empty()) {
            specs.base = TypeExpr::scalar(scalar_spelling(counts, start));
        } else {
            fail(tok(), "declaration without a type specifier");
        }
        quals.apply(specs.base);
        return specs;
    }

    std::string scalar_spelling(const std::map<std::string, int>& counts, const Token& at) const {
        auto n = [&](const char* k) {
            auto it = counts.find(k);
            return it == counts.end() ? 0 : it->second;
        };
        bool is_unsigned = n("unsigned") > 0;
        bool is_signed = n("signed") > 0;
        bool is_complex = n("_Complex") > 0;
        if (is_unsigned && is_signed) fail(at, "both signed and unsigned");
        int longs = n("long");

        std::string core;
        for (const char* exotic : {"void", "_Bool", "float", "__int128", "_Float16", "_Float32", "_Float64",
                                   "_Float128", "_Float32x", "_Float64x", "_Float128x", "__float128",
                                   "__float80", "__fp16", "__bf16", "_Decimal32", "_Decimal64",
                                   "_Decimal128"}) {
            if (n(exotic) > 0) {
                if (!core.empty()) fail(at, "conflicting type specifiers");
                core = exotic;
            }
        }
        if (n("double") > 0) {
            if (!core.empty()) fail(at, "conflicting type specifiers");
            core = longs == 1 ? "long double" : "double";
            longs = 0;
        }
        if (!core.empty()) {
            if (longs > 0 || n("short") > 0 || n("char") > 0 || n("int") > 0) {
                fail(at, "conflicting type specifiers");
            }
            if (core == "__int128") {
                return is_unsigned ? "unsigned __int128" : "__int128";
            }
            if (is_unsigned || is_signed) fail(at, "signedness on a non-integer type");
            return is_complex ? core + " _Complex" : core;
        }
        if (is_complex) fail(at, "_Complex without a floating type");
        std::string prefix = is_unsigned ? "unsigned " : "";
        if (n("char") > 0) {
            if (longs > 0 || n("short") > 0 || n("int") > 0) fail(at, "conflicting type specifiers");
            if (is_signed) return "signed char";
            return prefix + "char";
        }
        if (n("short") > 0) {
            if (longs > 0) fail(at, "conflicting type specifiers");
            return prefix + "short";
        }
        if (longs == 1) return prefix + "long";
        if (longs == 2) return prefix + "long long";
        if (longs > 2) fail(at, "too many 'long' specifiers");
        return prefix + "int";
    }

    TypeExpr tag_specifier() {
        const Token& kw = advance();
        std::string tag;
        if (tok().kind == Token::Kind::identifier && !tok().is("{")) tag = advance().text;
        bool has_body = false;
        if (tok().is("{")) {
            skip_balanced("{", "}");
            has_body = true;
        }
        if (tag.empty() && !has_body) fail(tok(), "expected a tag name or body after '" + kw.text + "'");
        if (tag.empty()) {
            return TypeExpr::record(kw.text + " <anonymous at " + lexed_.files.at(kw.file) + ":" +
                                    std::to_string(kw.line) + ">");
        }
        return TypeExpr::record(kw.text + " " + tag);
    }

    Qualifiers qualifier_list() {
        Qualifiers q;
        while (tok().kind == Token::Kind::identifier && is_qualifier(tok().text)) {
            const std::string& w = advance().text;
            if (const_keywords.contains(w)) q.is_const = true;
            if (volatile_keywords.contains(w)) q.is_volatile = true;
            if (restrict_keywords.contains(w)) q.is_restrict = true;
        }
        return q;
    }

    // After `(` in direct-declarator position: nested declarator or a
    // parameter list of an abstract function declarator?
    bool nested_declarator_follows() const {
        const Token& t = tok(1);
        if (t.is("*") || t.is("(") || t.is("[")) return true;
        if (t.kind == Token::Kind::identifier && !starts_type(t)) return true;
        return false;
    }

    Declarator declarator(bool allow_abstract) {
        Declarator d;
        while (accept("*")) d.pointers.push_back(qualifier_list());

        const Token& t = tok();
        if (t.kind == Token::Kind::identifier && !starts_type(t) && !asm_keywords.contains(t.text)) {
            d.name = t.text;
            d.name_token = &t;
            advance();
        } else if (t.kind == Token::Kind::identifier && is_typedef_name(t) && !allow_abstract) {
            // A typedef name redeclared as an ordinary identifier.
            d.name = t.text;
            d.name_token = &t;
            advance();
        } else if (t.is("(") && nested_declarator_follows()) {
            advance();
            d.nested = std::make_unique<Declarator>(declarator(allow_abstract));
            expect(")");
        } else if (!allow_abstract) {
            fail(t, "expected a declarator");
        }

        while (true) {
            if (tok().is("[")) {
                d.suffixes.push_back(array_suffix());
            } else if (tok().is("(")) {
                d.suffixes.push_back(function_suffix());
            } else {
                break;
            }
        }
        return d;
    }

    Suffix array_suffix() {
        Suffix s;
        expect("[");
        while (tok().kind == Token::Kind::identifier && (is_qualifier(tok().text) || tok().is("static"))) {
            if (accept("static")) continue;
            Qualifiers q = qualifier_list();
            s.array_qualifiers.is_const |= q.is_const;
            s.array_qualifiers.is_volatile |= q.is_volatile;
            s.array_qualifiers.is_restrict |= q.is_restrict;
        }
        std::vector<const Token*> expr;
        int depth = 0;
        while (true) {
            const Token& t = tok();
            if (at_end()) fail(t, "unterminated array bound");
            if (depth == 0 && t.is("]")) break;
            if (t.is("[") || t.is("(")) ++depth;
            if (t.is("]") || t.is(")")) --depth;
            expr.push_back(&t);
            advance();
        }
        expect("]");
        // Non-literal bounds are dropped: an array of unknown size is
        // compatible with any bound.
        if (expr.size() == 1 && expr[0]->kind == Token::Kind::number) s.extent = parse_integer_literal(expr[0]->text);
        return s;
    }

    Suffix function_suffix() {
        Suffix s;
        s.is_function = true;
        expect("(");
        if (accept(")")) {
            s.unprototyped = true;
            return s;
        }
        if (tok().is("void") && tok(1).is(")")) {
            advance();
            advance();
            return s;
        }
        while (true) {
            if (accept("...")) {
                s.variadic = true;
                expect(")");
                return s;
            }
            const Token& t = tok();
            if (t.kind == Token::Kind::identifier && !starts_type(t)) {
                fail(t, "K&R-style identifier lists are not supported");
            }
            DeclSpecs specs = declaration_specifiers(true);
            Declarator d = declarator(true);
            Resolved r = resolve(d, specs.base);
            s.params.push_back(Parameter{r.name, adjust_parameter(decay_typedef(std::move(r.type)))});
            if (accept(")")) return s;
            expect(",");
        }
    }

    Resolved resolve(const Declarator& d, TypeExpr base) {
        TypeExpr t = std::move(base);
        for (const Qualifiers& q : d.pointers) {
            t = TypeExpr::pointer(std::move(t));
            q.apply(t);
        }
        for (auto it = d.suffixes.rbegin(); it != d.suffixes.rend(); ++it) {
            if (it->is_function) {
                std::vector<TypeExpr> params;
                for (const auto& p : it->params) params.push_back(p.type);
                TypeExpr f = TypeExpr::function(std::move(t), std::move(params), it->variadic);
                f.unprototyped = it->unprototyped;
                t = std::move(f);
            } else {
                TypeExpr a = TypeExpr::array(std::move(t), it->extent);
                it->array_qualifiers.apply(a);
                t = std::move(a);
            }
        }
        if (d.nested) {
            Resolved inner = resolve(*d.nested, std::move(t));
            if (inner.function_suffix == nullptr && d.nested->pointers.empty() &&
                d.nested->suffixes.empty() && !d.suffixes.empty() && d.suffixes.front().is_function) {
                // `int (f)(int x)`: the parenthesized name is the function itself.
                inner.function_suffix = &d.suffixes.front();
            }
            return inner;
        }
        Resolved r;
        r.name = d.name;
        r.name_token = d.name_token;
        r.type = std::move(t);
        if (!d.suffixes.empty() && d.suffixes.front().is_function) r.function_suffix = &d.suffixes.front();
        return r;
    }

    // ---- recording -----------------------------------------------------

    void record(const DeclSpecs& specs, const Resolved& r, const TypeExpr& function,
                const std::optional<std::string>& asm_label) {
        FunctionDecl fd;
        fd.name = *r.name;
        fd.return_type = function.return_type();
        fd.variadic = function.variadic;
        fd.empty_parens_unknown_args = function.unprototyped;
        if (r.function_suffix != nullptr && &function == &r.type) {
            fd.params = r.function_suffix->params;
        } else {
            for (std::size_t i = 1; i < function.children.size(); ++i) {
                fd.params.push_back(Parameter{std::nullopt, function.children[i]});
            }
        }
        fd.is_inline_or_static = specs.is_inline || specs.is_static;
        fd.internal_linkage = specs.is_static;
        fd.asm_label = asm_label;
        fd.location = SourceLocation{lexed_.files.at(r.name_token->file), r.name_token->line};

        auto [it, inserted] = index_.try_emplace(fd.name, decls_.size());
        if (inserted) {
            decls_.push_back(std::move(fd));
            return;
        }
        merge_into(decls_[it->second], std::move(fd), *r.name_token);
    }

    TypeExpr compat_form(const TypeExpr& t, int depth = 0) const {
        if (depth > 64) return t;
        if (t.kind == TypeExpr::Kind::typedef_ref) {
            auto it = typedefs_.find(t.base);
            if (it != typedefs_.end() && !(it->second == t.unqualified())) {
                TypeExpr resolved = compat_form(it->second, depth + 1);
                resolved.is_const |= t.is_const;
                resolved.is_volatile |= t.is_volatile;
                resolved.is_restrict |= t.is_restrict;
                return resolved;
            }
            return t;
        }
        TypeExpr out = t;
        for (std::size_t i = 0; i < out.children.size(); ++i) {
            out.children[i] = compat_form(out.children[i], depth + 1);
            if (out.kind == TypeExpr::Kind::function_type && i > 0) out.children[i] = out.children[i].unqualified();
        }
        return out;
    }

    void merge_into(FunctionDecl& existing, FunctionDecl incoming, const Token& at) {
        bool existing_proto = !existing.empty_parens_unknown_args;
        bool incoming_proto = !incoming.empty_parens_unknown_args;
        bool same_return = compat_form(existing.return_type) == compat_form(incoming.return_type);
        bool compatible = same_return;
        if (compatible && existing_proto && incoming_proto) {
            compatible = compat_form(existing.type()) == compat_form(incoming.type());
        }
        if (!compatible) {
            fail(at, "conflicting declaration of '" + existing.name + "' (first declared at " +
                         existing.location.file + ":" + std::to_string(existing.location.line) + ")");
        }
        if (!existing_proto && incoming_proto) {
            existing.params = std::move(incoming.params);
            existing.variadic = incoming.variadic;
            existing.empty_parens_unknown_args = false;
        } else if (existing_proto && incoming_proto) {
            for (std::size_t i = 0; i < existing.params.size(); ++i) {
                if (!existing.params[i].name) existing.params[i].name = incoming.params[i].name;
            }
        }
        existing.is_inline_or_static = existing.is_inline_or_static || incoming.is_inline_or_static;
        existing.internal_linkage = existing.internal_linkage || incoming.internal_linkage;
        if (!existing.asm_label) existing.asm_label = std::move(incoming.asm_label);
    }

    detail::LexedSource lexed_;
    std::size_t pos_ = 0;
    std::unordered_map<std::string, TypeExpr> typedefs_;
    std::vector<FunctionDecl> decls_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

std::string preprocess(const WrapperConfig& config, const fs::path& header_aggregate, const Toolchain& toolchain,
                       const fs::path& cwd) {
    if (!fs::exists(header_aggregate)) throw Error("header " + header_aggregate.string() + " does not exist");
    std::vector<std::string> args{"-E"};
    args.insert(args.end(), config.preprocessor_flags.begin(), config.preprocessor_flags.end());
    args.push_back(header_aggregate.string());
    std::vector<std::string> cmd = toolchain.compile_command(args);
    RunOptions options;
    options.cwd = cwd;
    ProcessResult result = toolchain.run(cmd, options);
    if (!result.ok()) throw CommandError("preprocessing the umbrella header failed", format_command(cmd), result.err);
    return std::move(result.out);
}

std::vector<FunctionDecl> parse_declarations(std::string_view source, const fs::path& base_dir) {
    return Parser(detail::lex_preprocessed(source, base_dir)).run();
}

std::vector<ScanWarning> warn_unwrappable(std::span<const FunctionDecl> decls, const WrapperConfig& config) {
    std::vector<ScanWarning> warnings;
    for (const FunctionDecl& d : decls) {
        auto warn = [&](WarningKind kind, std::string message) {
            warnings.push_back(ScanWarning{kind, d.name, d.location, std::move(message)});
        };
        if (d.internal_linkage) {
            warn(WarningKind::internal_linkage,
                 "function '" + d.name + "' has internal linkage (static); it has no symbol to wrap and is left out");
        }
        if (d.asm_label) {
            warn(WarningKind::asm_label, "function '" + d.name + "' is bound to the assembler symbol '" +
                                             *d.asm_label + "'; such renames are not supported and it is left out");
        }
        if (d.variadic && !config.ellipsis_mappings.contains(d.name)) {
            warn(WarningKind::variadic_without_mapping,
                 "function '" + d.name +
                     "' has an ellipsis argument; variadic calls cannot be forwarded in C. Add an ellipsis "
                     "mapping to its v-version (e.g. printf:vprintf) to wrap it; it is left out");
        }
        if (d.empty_parens_unknown_args && !config.variadic_is_void.contains(d.name)) {
            warn(WarningKind::unknown_arguments,
                 "function '" + d.name +
                     "' is declared with an unknown argument list '()'; list it as variadic-is-void if it "
                     "takes no arguments; it is left out");
        }
        if (d.is_inline_or_static && !d.internal_linkage) {
            warn(WarningKind::inline_function,
                 "function '" + d.name + "' is inline; calls the compiler inlines cannot be intercepted");
        }
    }
    return warnings;
}

std::string format_warning(const ScanWarning& warning) {
    return "warning: " + warning.location.file + ":" + std::to_string(warning.location.line) + ": " +
           warning.message;
}

}  // namespace libwrap
