#include "rankone/rat.hpp"

#include <ostream>
#include <utility>

#include "rankone/errors.hpp"

namespace rankone {

Rat::Rat(long num, long den) : q_(num, den) {
    if (den == 0) throw Error("Rat: zero denominator");
    q_.canonicalize();
}

Rat::Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

Rat Rat::parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw ParseError("Rat: empty string");
    const auto slash = s.find('/');
    auto valid_int = [](const std::string& part) {
        if (part.empty()) return false;
        std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (i == part.size()) return false;
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9') return false;
        return true;
    };
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
        throw ParseError("Rat: malformed rational '" + s + "'");
    mpz_class n(num[0] == '+' ? num.substr(1) : num, 10);
    mpz_class d(den, 10);
    if (d == 0) throw ParseError("Rat: zero denominator in '" + s + "'");
    return Rat(mpq_class(n, d));
}

std::string Rat::to_string() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rat& Rat::operator+=(const Rat& o) {
    q_ += o.q_;
    return *this;
}
Rat& Rat::operator-=(const Rat& o) {
    q_ -= o.q_;
    return *this;
}
Rat& Rat::operator*=(const Rat& o) {
    q_ *= o.q_;
    return *this;
}
Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw Error("Rat: division by zero");
    q_ /= o.q_;
    return *this;
}

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

Rat pow(const Rat& r, unsigned e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), r.raw().get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), r.raw().get_den_mpz_t(), e);
    return Rat(mpq_class(n, d));
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

}  // namespace rankone
