#include "alh/ratfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "alh/errors.hpp"

namespace alh {

namespace {

struct Registry {
    std::mutex mu;
    std::vector<std::string> names;
    Registry() {
        // Fixed prefix so the monomial order is stable across runs.
        for (const char* n : {"x", "r", "xi", "y1", "y2", "theta", "s", "s_prime", "S", "Y1", "Y2",
                              "xt", "yt1", "yt2", "t", "c", "gamma"})
            names.emplace_back(n);
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

std::atomic<int> g_degree_limit{64};
// gcd intermediates may legitimately exceed the limit.
thread_local int t_unchecked = 0;

struct Unchecked {
    Unchecked() { ++t_unchecked; }
    ~Unchecked() { --t_unchecked; }
};

void check_degree(const Monomial& m) {
    if (!t_unchecked && m.degree() > g_degree_limit.load())
        throw DegreeOverflow("total degree " + std::to_string(m.degree()) + " exceeds limit " +
                             std::to_string(g_degree_limit.load()));
}

struct MonoDesc {
    bool operator()(const Term& a, const Term& b) const { return mono_greater(a.m, b.m); }
};

} // namespace

Var var(std::string_view name) {
    auto& r = registry();
    std::lock_guard<std::mutex> lk(r.mu);
    for (std::size_t i = 0; i < r.names.size(); ++i)
        if (r.names[i] == name) return Var{static_cast<int>(i)};
    if (static_cast<int>(r.names.size()) >= kMaxVars)
        throw UsageError("too many variables (limit " + std::to_string(kMaxVars) + ")");
    r.names.emplace_back(name);
    return Var{static_cast<int>(r.names.size() - 1)};
}

std::string_view var_name(Var v) {
    auto& r = registry();
    std::lock_guard<std::mutex> lk(r.mu);
    return r.names.at(static_cast<std::size_t>(v.id));
}

int registered_var_count() {
    auto& r = registry();
    std::lock_guard<std::mutex> lk(r.mu);
    return static_cast<int>(r.names.size());
}

int degree_limit() { return g_degree_limit.load(); }
void set_degree_limit(int limit) { g_degree_limit.store(limit); }

int Monomial::degree() const {
    static_assert(kMaxVars % 8 == 0);
    std::uint64_t total = 0;
    for (int i = 0; i < kMaxVars; i += 8) {
        std::uint64_t w;
        std::memcpy(&w, e.data() + i, 8);
        w = (w & 0x00FF00FF00FF00FFull) + ((w >> 8) & 0x00FF00FF00FF00FFull);
        total += (w * 0x0001000100010001ull) >> 48;
    }
    return static_cast<int>(total);
}

bool mono_greater(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    return std::memcmp(a.e.data(), b.e.data(), kMaxVars) > 0;
}

// ---------------------------------------------------------------- Poly

Poly::Poly(const mpq_class& c) {
    if (c != 0) terms_.push_back({Monomial{}, c});
}

Poly Poly::variable(Var v) {
    Monomial m;
    m.e[v.id] = 1;
    return monomial(m, 1);
}

Poly Poly::monomial(const Monomial& m, const mpq_class& c) {
    Poly p;
    if (c != 0) p.terms_.push_back({m, c});
    return p;
}

Poly Poly::from_terms(std::vector<Term> ts) {
    std::sort(ts.begin(), ts.end(), MonoDesc{});
    Poly p;
    for (auto& t : ts) {
        if (!p.terms_.empty() && p.terms_.back().m == t.m)
            p.terms_.back().c += t.c;
        else
            p.terms_.push_back(std::move(t));
        if (p.terms_.back().c == 0) p.terms_.pop_back();
    }
    // A zero sum can leave an equal monomial next to a survivor; merge once more.
    std::vector<Term> out;
    for (auto& t : p.terms_) {
        if (!out.empty() && out.back().m == t.m) {
            out.back().c += t.c;
            if (out.back().c == 0) out.pop_back();
        } else {
            out.push_back(std::move(t));
        }
    }
    p.terms_ = std::move(out);
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].m.degree() == 0);
}

int Poly::total_degree() const { return terms_.empty() ? -1 : terms_.front().m.degree(); }

int Poly::degree_in(Var v) const {
    int d = terms_.empty() ? -1 : 0;
    for (auto& t : terms_) d = std::max(d, int(t.m.e[v.id]));
    return d;
}

int Poly::min_degree_in(Var v) const {
    int d = 1 << 20;
    for (auto& t : terms_) d = std::min(d, int(t.m.e[v.id]));
    return terms_.empty() ? 0 : d;
}

bool Poly::depends_on(Var v) const {
    for (auto& t : terms_)
        if (t.m.e[v.id]) return true;
    return false;
}

std::vector<Var> Poly::variables() const {
    std::vector<Var> out;
    for (int i = 0; i < kMaxVars; ++i)
        if (depends_on(Var{i})) out.push_back(Var{i});
    return out;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.c = -t.c;
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly out;
    auto& o = out.terms_;
    o.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
        if (j == b.terms_.size() || (i < a.terms_.size() && mono_greater(a.terms_[i].m, b.terms_[j].m))) {
            o.push_back(a.terms_[i++]);
        } else if (i == a.terms_.size() || mono_greater(b.terms_[j].m, a.terms_[i].m)) {
            o.push_back(b.terms_[j++]);
        } else {
            mpq_class c = a.terms_[i].c + b.terms_[j].c;
            if (c != 0) o.push_back({a.terms_[i].m, c});
            ++i;
            ++j;
        }
    }
    return out;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Term> ts;
    ts.reserve(a.terms_.size() * b.terms_.size());
    for (auto& s : a.terms_)
        for (auto& t : b.terms_) {
            Monomial m;
            for (int k = 0; k < kMaxVars; ++k) {
                int e = int(s.m.e[k]) + int(t.m.e[k]);
                if (e > 255) throw DegreeOverflow("exponent overflow");
                m.e[k] = static_cast<std::uint8_t>(e);
            }
            check_degree(m);
            ts.push_back({m, s.c * t.c});
        }
    return Poly::from_terms(std::move(ts));
}

Poly Poly::scaled(const mpq_class& c) const {
    if (c == 0) return Poly();
    Poly p = *this;
    for (auto& t : p.terms_) t.c *= c;
    return p;
}

Poly Poly::shifted(const Monomial& m) const {
    Poly p = *this;
    for (auto& t : p.terms_) {
        for (int k = 0; k < kMaxVars; ++k) t.m.e[k] = static_cast<std::uint8_t>(t.m.e[k] + m.e[k]);
        check_degree(t.m);
    }
    return p;
}

bool Poly::operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (!(terms_[i].m == o.terms_[i].m) || terms_[i].c != o.terms_[i].c) return false;
    return true;
}

Poly Poly::derive(Var v) const {
    std::vector<Term> ts;
    for (auto& t : terms_) {
        int e = t.m.e[v.id];
        if (e == 0) continue;
        Term u = t;
        u.m.e[v.id] = static_cast<std::uint8_t>(e - 1);
        u.c *= e;
        ts.push_back(std::move(u));
    }
    return from_terms(std::move(ts));
}

mpq_class Poly::eval(const std::map<Var, mpq_class>& at) const {
    mpq_class sum = 0;
    for (auto& t : terms_) {
        mpq_class prod = t.c;
        for (int k = 0; k < kMaxVars; ++k) {
            if (!t.m.e[k]) continue;
            auto it = at.find(Var{k});
            if (it == at.end())
                throw UsageError("no value supplied for variable " + std::string(var_name(Var{k})));
            mpz_class n, d;
            mpz_pow_ui(n.get_mpz_t(), it->second.get_num_mpz_t(), t.m.e[k]);
            mpz_pow_ui(d.get_mpz_t(), it->second.get_den_mpz_t(), t.m.e[k]);
            mpq_class f(n, d);
            f.canonicalize();
            prod *= f;
        }
        sum += prod;
    }
    return sum;
}

double Poly::eval(std::span<const double> by_id) const {
    double sum = 0;
    for (auto& t : terms_) {
        double prod = t.c.get_d();
        for (int k = 0; k < kMaxVars; ++k) {
            if (!t.m.e[k]) continue;
            if (k >= static_cast<int>(by_id.size()))
                throw UsageError("no value supplied for variable " + std::string(var_name(Var{k})));
            prod *= std::pow(by_id[k], t.m.e[k]);
        }
        sum += prod;
    }
    return sum;
}

std::vector<Poly> Poly::split(Var v) const {
    std::vector<Poly> out(static_cast<std::size_t>(std::max(degree_in(v), 0) + 1));
    std::vector<std::vector<Term>> buckets(out.size());
    for (auto& t : terms_) {
        Term u = t;
        int e = u.m.e[v.id];
        u.m.e[v.id] = 0;
        buckets[e].push_back(std::move(u));
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = from_terms(std::move(buckets[i]));
    return out;
}

Poly Poly::join(const std::vector<Poly>& coeffs, Var v) {
    std::vector<Term> ts;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        for (auto t : coeffs[i].terms()) {
            t.m.e[v.id] = static_cast<std::uint8_t>(t.m.e[v.id] + i);
            ts.push_back(std::move(t));
        }
    return from_terms(std::move(ts));
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
        mpq_class c = t.c;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        bool has_var = t.m.degree() > 0;
        if (!has_var || c != 1) {
            os << c.get_str();
            if (has_var) os << "*";
        }
        bool firstv = true;
        for (int k = 0; k < kMaxVars; ++k) {
            if (!t.m.e[k]) continue;
            if (!firstv) os << "*";
            firstv = false;
            os << var_name(Var{k});
            if (t.m.e[k] > 1) os << "^" << int(t.m.e[k]);
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- gcd

namespace {

bool mono_divides(const Monomial& a, const Monomial& b) {
    for (int k = 0; k < kMaxVars; ++k)
        if (a.e[k] > b.e[k]) return false;
    return true;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
    Monomial m;
    for (int k = 0; k < kMaxVars; ++k) m.e[k] = static_cast<std::uint8_t>(b.e[k] - a.e[k]);
    return m;
}

Monomial mono_min(const Poly& p) {
    Monomial m = p.terms().front().m;
    for (auto& t : p.terms())
        for (int k = 0; k < kMaxVars; ++k) m.e[k] = std::min(m.e[k], t.m.e[k]);
    return m;
}

int pick_var(const Poly& a, const Poly& b) {
    for (int k = kMaxVars - 1; k >= 0; --k)
        if (a.depends_on(Var{k}) || b.depends_on(Var{k})) return k;
    return -1;
}

Poly gcd_rec(const Poly& a, const Poly& b);

Poly content_in(const Poly& p, Var v) {
    Poly g;
    for (auto& c : p.split(v)) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? primitive_part(c) : gcd_rec(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g;
}

Poly exact(const Poly& a, const Poly& b) {
    auto q = divide_exact(a, b);
    if (!q) throw IdentityFailure("internal: inexact division in gcd");
    return *q;
}

Poly prem(const Poly& a, const Poly& b, Var v) {
    auto bs = b.split(v);
    int db = static_cast<int>(bs.size()) - 1;
    Poly lb = bs.back();
    Poly r = a;
    int da = r.degree_in(v);
    int steps = da - db + 1;
    while (!r.is_zero() && r.degree_in(v) >= db) {
        auto rs = r.split(v);
        int dr = static_cast<int>(rs.size()) - 1;
        Monomial sh;
        sh.e[v.id] = static_cast<std::uint8_t>(dr - db);
        r = r * lb - (b * rs.back()).shifted(sh);
        --steps;
    }
    for (; steps > 0; --steps) r = r * lb;
    return r;
}

// Univariate images over Q; exact Euclid.
std::vector<mpq_class> image(const Poly& p, Var v, const std::map<Var, mpq_class>& at) {
    auto cs = p.split(v);
    std::vector<mpq_class> out(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) out[i] = cs[i].eval(at);
    return out;
}

int uni_gcd_degree(std::vector<mpq_class> a, std::vector<mpq_class> b) {
    auto trim = [](std::vector<mpq_class>& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    };
    trim(a);
    trim(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        while (a.size() >= b.size() && !a.empty()) {
            mpq_class q = a.back() / b.back();
            std::size_t sh = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[sh + i] -= q * b[i];
            a.pop_back();
            trim(a);
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

// True only when a and b are provably coprime: every shared variable drops out
// of the gcd of some degree-preserving univariate image.
bool provably_coprime(const Poly& a, const Poly& b) {
    std::map<Var, mpq_class> at;
    for (int k = 0; k < kMaxVars; ++k) {
        mpq_class q(7 + 4 * k, 3 + k % 5);
        q.canonicalize();
        at[Var{k}] = q;
    }
    for (int k = 0; k < kMaxVars; ++k) {
        Var v{k};
        if (!a.depends_on(v) || !b.depends_on(v)) continue;
        auto ia = image(a, v, at), ib = image(b, v, at);
        if (ia.back() == 0 || ib.back() == 0) return false;
        if (uni_gcd_degree(ia, ib) != 0) return false;
    }
    return true;
}

Poly eval_at_int(const Poly& p, Var v, const mpz_class& xi) {
    auto cs = p.split(v);
    Poly out;
    mpq_class pw = 1;
    for (auto& c : cs) {
        out = out + c.scaled(pw);
        pw *= xi;
    }
    return out;
}

mpz_class max_coeff(const Poly& p) {
    mpz_class m = 0;
    for (auto& t : p.terms()) {
        mpz_class a = abs(t.c.get_num());
        if (a > m) m = a;
    }
    return m;
}

// Heuristic gcd by evaluation at a large integer and xi-adic reconstruction.
// Inputs are primitive integer polynomials; a verified answer or nullopt.
std::optional<Poly> heu_gcd(const Poly& a, const Poly& b, int depth = 0) {
    if (a.is_constant() || b.is_constant()) {
        mpz_class g = 0;
        for (auto& t : a.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
        for (auto& t : b.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
        return Poly(mpq_class(g));
    }
    int k = pick_var(a, b);
    Var v{k};
    mpz_class xi = 2 * std::min(max_coeff(a), max_coeff(b)) + 29;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Poly ea = eval_at_int(a, v, xi), eb = eval_at_int(b, v, xi);
        if (!ea.is_zero() && !eb.is_zero()) {
            auto h = heu_gcd(ea, eb, depth + 1);
            if (h) {
                std::vector<Poly> coeffs;
                Poly rest = *h;
                for (int guard = 0; !rest.is_zero() && guard < 512; ++guard) {
                    std::vector<Term> digit;
                    for (auto& t : rest.terms()) {
                        mpz_class c = t.c.get_num(), r;
                        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
                        if (2 * r > xi) r -= xi;
                        if (r != 0) digit.push_back({t.m, mpq_class(r)});
                    }
                    Poly g = Poly::from_terms(std::move(digit));
                    coeffs.push_back(g);
                    rest = (rest - g).scaled(mpq_class(1) / mpq_class(xi));
                }
                if (rest.is_zero()) {
                    Poly cand = primitive_part(Poly::join(coeffs, v));
                    if (!cand.is_zero() && divide_exact(a, cand) && divide_exact(b, cand)) {
                        if (depth == 0) return cand;
                        // Inner levels carry integer content too.
                        mpz_class ca = 0, cb = 0;
                        for (auto& t : a.terms()) mpz_gcd(ca.get_mpz_t(), ca.get_mpz_t(), t.c.get_num_mpz_t());
                        for (auto& t : b.terms()) mpz_gcd(cb.get_mpz_t(), cb.get_mpz_t(), t.c.get_num_mpz_t());
                        mpz_class c;
                        mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
                        return cand.scaled(mpq_class(c));
                    }
                }
            }
        }
        xi = xi * 73794 / 27011 + 1;
    }
    return std::nullopt;
}

Poly gcd_rec(const Poly& a, const Poly& b) {
    if (a.is_zero()) return primitive_part(b);
    if (b.is_zero()) return primitive_part(a);
    if (a.is_constant() || b.is_constant()) return Poly(1);
    if (a.is_monomial() || b.is_monomial()) {
        Monomial ma = mono_min(a), mb = mono_min(b), m;
        for (int k = 0; k < kMaxVars; ++k) m.e[k] = std::min(ma.e[k], mb.e[k]);
        return Poly::monomial(m, 1);
    }
    Poly pa = primitive_part(a), pb = primitive_part(b);
    if (pa == pb) return pa;
    if (provably_coprime(pa, pb)) return Poly(1);
    if (auto h = heu_gcd(pa, pb)) return primitive_part(*h);
    int k = pick_var(pa, pb);
    Var v{k};
    bool ia = pa.depends_on(v), ib = pb.depends_on(v);
    if (!ia) return gcd_rec(pa, content_in(pb, v));
    if (!ib) return gcd_rec(content_in(pa, v), pb);
    Poly ca = content_in(pa, v), cb = content_in(pb, v);
    Poly c = gcd_rec(ca, cb);
    Poly f = exact(pa, ca), g = exact(pb, cb);
    if (f.degree_in(v) < g.degree_in(v)) std::swap(f, g);
    while (true) {
        Poly r = prem(f, g, v);
        if (r.is_zero()) break;
        if (r.degree_in(v) == 0) {
            g = Poly(1);
            break;
        }
        f = g;
        g = primitive_part(exact(r, content_in(r, v)));
    }
    if (!g.is_constant()) g = primitive_part(exact(g, content_in(g, v)));
    return primitive_part(c * g);
}

} // namespace

Poly primitive_part(const Poly& p) {
    if (p.is_zero()) return p;
    mpz_class l = 1, g = 0;
    for (auto& t : p.terms()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
    }
    mpq_class s(l, g);
    s.canonicalize();
    if (p.lead().c < 0) s = -s;
    return p.scaled(s);
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
    if (b.is_constant()) return a.scaled(1 / b.lead().c);
    Unchecked guard;
    std::vector<Term> q;
    Poly r = a;
    const Term& lb = b.lead();
    while (!r.is_zero()) {
        const Term& lr = r.lead();
        if (!mono_divides(lb.m, lr.m)) return std::nullopt;
        Term t{mono_div(lr.m, lb.m), lr.c / lb.c};
        r = r - b.shifted(t.m).scaled(t.c);
        q.push_back(std::move(t));
    }
    return Poly::from_terms(std::move(q));
}

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return Poly();
    Unchecked guard;
    return gcd_rec(a, b);
}

// ---------------------------------------------------------------- RatFun

RatFun::RatFun(const Poly& num, const Poly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
    canonicalize();
}

void RatFun::canonicalize() {
    if (num_.is_zero()) {
        den_ = Poly(1);
        return;
    }
    if (!den_.is_constant()) {
        Poly g = gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *divide_exact(num_, g);
            den_ = *divide_exact(den_, g);
        }
    }
    mpq_class l = den_.lead().c;
    if (l != 1) {
        num_ = num_.scaled(1 / l);
        den_ = den_.scaled(1 / l);
    }
}

RatFun RatFun::power(Var v, int k) {
    Monomial m;
    m.e[v.id] = static_cast<std::uint8_t>(std::abs(k));
    check_degree(m);
    Poly p = Poly::monomial(m, 1);
    return k >= 0 ? RatFun(p) : RatFun(Poly(1), p);
}

mpq_class RatFun::constant_value() const {
    if (!is_constant()) throw UsageError("not a constant: " + str());
    if (num_.is_zero()) return 0;
    return num_.lead().c / den_.lead().c;
}

std::vector<Var> RatFun::variables() const {
    std::vector<Var> out;
    for (int i = 0; i < kMaxVars; ++i)
        if (depends_on(Var{i})) out.push_back(Var{i});
    return out;
}

RatFun RatFun::operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    RatFun r;
    if (a.den_ == b.den_) {
        r.num_ = a.num_ + b.num_;
        r.den_ = a.den_;
    } else if (a.den_.is_constant() && b.den_.is_constant()) {
        r.num_ = a.num_ + b.num_;  // both monic constants, i.e. 1
        r.den_ = Poly(1);
    } else {
        Poly g = gcd(a.den_, b.den_);
        Poly bs = *divide_exact(b.den_, g);
        Poly as = *divide_exact(a.den_, g);
        r.num_ = a.num_ * bs + b.num_ * as;
        r.den_ = a.den_ * bs;
    }
    r.canonicalize();
    return r;
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }

RatFun operator*(const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun();
    RatFun r;
    if (a.den_.is_constant() && b.den_.is_constant()) {
        r.num_ = a.num_ * b.num_;
        r.den_ = Poly(1);
        return r;
    }
    Poly g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
    Poly an = *divide_exact(a.num_, g1), bd = *divide_exact(b.den_, g1);
    Poly bn = *divide_exact(b.num_, g2), ad = *divide_exact(a.den_, g2);
    r.num_ = an * bn;
    r.den_ = ad * bd;
    mpq_class l = r.den_.lead().c;
    if (l != 1) {
        r.num_ = r.num_.scaled(1 / l);
        r.den_ = r.den_.scaled(1 / l);
    }
    return r;
}

RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw DivisionByZero("division by the zero rational function");
    RatFun inv;
    inv.num_ = b.den_;
    inv.den_ = b.num_;
    mpq_class l = inv.den_.lead().c;
    inv.num_ = inv.num_.scaled(1 / l);
    inv.den_ = inv.den_.scaled(1 / l);
    return a * inv;
}

RatFun RatFun::pow(int k) const {
    if (k < 0) return RatFun(1) / pow(-k);
    RatFun r(1), b = *this;
    while (k) {
        if (k & 1) r *= b;
        k >>= 1;
        if (k) b *= b;
    }
    return r;
}

bool RatFun::operator==(const RatFun& o) const { return num_ * o.den_ == o.num_ * den_; }

RatFun RatFun::derive(Var v) const {
    if (!depends_on(v)) return RatFun();
    if (den_.is_constant()) return RatFun(num_.derive(v).scaled(1 / den_.lead().c));
    return RatFun(num_.derive(v) * den_ - num_ * den_.derive(v), den_ * den_);
}

mpq_class RatFun::eval(const std::map<Var, mpq_class>& at) const {
    mpq_class d = den_.eval(at);
    if (d == 0) throw PoleError("pole: denominator " + den_.str() + " vanishes");
    return num_.eval(at) / d;
}

double RatFun::eval(std::span<const double> by_id) const {
    double d = den_.eval(by_id);
    if (d == 0) throw PoleError("pole: denominator " + den_.str() + " vanishes");
    return num_.eval(by_id) / d;
}

RatFun substitute_poly(const Poly& p, const std::map<Var, RatFun>& s) {
    std::map<std::pair<int, int>, RatFun> cache;
    auto pw = [&](int k, int e) -> const RatFun& {
        auto key = std::make_pair(k, e);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto sit = s.find(Var{k});
        RatFun base = sit == s.end() ? RatFun::variable(Var{k}) : sit->second;
        return cache.emplace(key, base.pow(e)).first->second;
    };
    RatFun sum;
    for (auto& t : p.terms()) {
        RatFun prod(t.c);
        Monomial keep;
        for (int k = 0; k < kMaxVars; ++k) {
            if (!t.m.e[k]) continue;
            if (s.count(Var{k}))
                prod *= pw(k, t.m.e[k]);
            else
                keep.e[k] = t.m.e[k];
        }
        sum += prod * RatFun(Poly::monomial(keep, 1));
    }
    return sum;
}

RatFun RatFun::substitute(const std::map<Var, RatFun>& s) const {
    return substitute_poly(num_, s) / substitute_poly(den_, s);
}

int RatFun::valuation(Var v) const {
    if (is_zero()) throw UsageError("valuation of zero");
    return num_.min_degree_in(v) - den_.min_degree_in(v);
}

RatFun RatFun::leading_at_zero(Var v) const {
    auto ns = num_.split(v), ds = den_.split(v);
    return RatFun(ns[num_.min_degree_in(v)]) / RatFun(ds[den_.min_degree_in(v)]);
}

std::string RatFun::str() const {
    if (den_.is_constant()) return num_.str();
    auto wrap = [](const Poly& p) { return p.is_monomial() && p.lead().c == 1 ? p.str() : "(" + p.str() + ")"; };
    return wrap(num_) + "/" + wrap(den_);
}

} // namespace alh
