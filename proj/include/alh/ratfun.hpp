#ifndef ALH_RATFUN_HPP
#define ALH_RATFUN_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace alh {

constexpr int kMaxVars = 32;

// Handle into the global variable registry. Registry order is the monomial order.
struct Var {
    int id = -1;
    bool operator==(const Var&) const = default;
    auto operator<=>(const Var&) const = default;
};

Var var(std::string_view name);
std::string_view var_name(Var v);
int registered_var_count();

// Total-degree limit applied to every product; throws DegreeOverflow.
int degree_limit();
void set_degree_limit(int limit);

struct Monomial {
    std::array<std::uint8_t, kMaxVars> e{};
    int degree() const;
    bool operator==(const Monomial&) const = default;
};

// Graded lex; true when a is strictly greater than b.
bool mono_greater(const Monomial& a, const Monomial& b);

struct Term {
    Monomial m;
    mpq_class c;
};

class Poly {
public:
    Poly() = default;
    Poly(const mpq_class& c);
    Poly(long c) : Poly(mpq_class(c)) {}
    static Poly variable(Var v);
    static Poly monomial(const Monomial& m, const mpq_class& c);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    const Term& lead() const { return terms_.front(); }
    int total_degree() const;
    int degree_in(Var v) const;
    int min_degree_in(Var v) const;
    bool depends_on(Var v) const;
    std::vector<Var> variables() const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const mpq_class& c) const;
    Poly shifted(const Monomial& m) const;
    bool operator==(const Poly& o) const;

    Poly derive(Var v) const;
    mpq_class eval(const std::map<Var, mpq_class>& at) const;
    double eval(std::span<const double> by_id) const;

    // Coefficients by power of v (index = power).
    std::vector<Poly> split(Var v) const;
    static Poly join(const std::vector<Poly>& coeffs, Var v);

    std::string str() const;

    // Internal: builds from unsorted terms, combining duplicates.
    static Poly from_terms(std::vector<Term> ts);

private:
    std::vector<Term> terms_;
};

// Exact quotient a/b when b divides a, otherwise nullopt.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
// Primitive integer gcd with positive leading coefficient; gcd(0,0) = 0.
Poly gcd(const Poly& a, const Poly& b);
// Smallest positive scale making coefficients coprime integers with positive lead.
Poly primitive_part(const Poly& p);

class RatFun {
public:
    RatFun() : den_(1) {}
    RatFun(const mpq_class& c) : num_(c), den_(1) {}
    RatFun(long c) : RatFun(mpq_class(c)) {}
    RatFun(int c) : RatFun(mpq_class(c)) {}
    RatFun(const Poly& p) : num_(p), den_(1) {}
    RatFun(const Poly& num, const Poly& den);

    static RatFun variable(Var v) { return RatFun(Poly::variable(v)); }
    static RatFun variable(std::string_view name) { return variable(var(name)); }
    // v^k with k of either sign.
    static RatFun power(Var v, int k);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    mpq_class constant_value() const;
    bool depends_on(Var v) const { return num_.depends_on(v) || den_.depends_on(v); }
    std::vector<Var> variables() const;

    RatFun operator-() const;
    friend RatFun operator+(const RatFun& a, const RatFun& b);
    friend RatFun operator-(const RatFun& a, const RatFun& b);
    friend RatFun operator*(const RatFun& a, const RatFun& b);
    friend RatFun operator/(const RatFun& a, const RatFun& b);
    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    RatFun& operator/=(const RatFun& o) { return *this = *this / o; }
    RatFun pow(int k) const;

    // Cross-multiplication equality.
    bool operator==(const RatFun& o) const;

    RatFun derive(Var v) const;
    RatFun derive(std::string_view name) const { return derive(var(name)); }
    mpq_class eval(const std::map<Var, mpq_class>& at) const;
    double eval(std::span<const double> by_id) const;
    RatFun substitute(const std::map<Var, RatFun>& s) const;

    // Order of vanishing in v at v = 0 (negative for poles), for nonzero values.
    int valuation(Var v) const;
    // Coefficient of v^valuation as a function of the remaining variables.
    RatFun leading_at_zero(Var v) const;

    std::string str() const;

private:
    void canonicalize();
    Poly num_;
    Poly den_;
};

RatFun substitute_poly(const Poly& p, const std::map<Var, RatFun>& s);

} // namespace alh

#endif
