#include "modgon/model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "modgon/errors.hpp"

namespace modgon {

DirichletSubgroup QuadricModel::delta() const {
  return subgroup_from_generators(level, delta_generators);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::int64_t to_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError("model: malformed " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::int64_t> int_list(std::string_view s, std::string_view what) {
  std::vector<std::int64_t> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(to_int(tok, what));
  return out;
}

// One signed term, e.g. "3*x0*x2", "x1^2", "2 x0 x1".
void parse_term(std::string_view term, int sign, int genus, std::map<std::pair<int, int>, std::int64_t>& acc) {
  std::int64_t coeff = 1;
  std::vector<int> vars;
  std::size_t pos = 0;
  bool saw_coeff = false;
  auto skip = [&] {
    while (pos < term.size() && (term[pos] == ' ' || term[pos] == '*' || term[pos] == '\t')) ++pos;
  };
  skip();
  while (pos < term.size()) {
    if (std::isdigit(static_cast<unsigned char>(term[pos]))) {
      if (saw_coeff || !vars.empty()) throw InputError("model: misplaced coefficient in '" + std::string(term) + "'");
      std::size_t end = pos;
      while (end < term.size() && std::isdigit(static_cast<unsigned char>(term[end]))) ++end;
      coeff = to_int(term.substr(pos, end - pos), "coefficient");
      saw_coeff = true;
      pos = end;
    } else if (term[pos] == 'x') {
      std::size_t end = pos + 1;
      while (end < term.size() && std::isdigit(static_cast<unsigned char>(term[end]))) ++end;
      if (end == pos + 1) throw InputError("model: bad variable in '" + std::string(term) + "'");
      int var = static_cast<int>(to_int(term.substr(pos + 1, end - pos - 1), "variable"));
      if (var < 0 || var >= genus) throw InputError("model: variable x" + std::to_string(var) + " out of range");
      std::int64_t e = 1;
      pos = end;
      if (pos < term.size() && term[pos] == '^') {
        end = pos + 1;
        while (end < term.size() && std::isdigit(static_cast<unsigned char>(term[end]))) ++end;
        e = to_int(term.substr(pos + 1, end - pos - 1), "exponent");
        pos = end;
      }
      for (std::int64_t k = 0; k < e; ++k) vars.push_back(var);
    } else {
      throw InputError("model: unexpected character in '" + std::string(term) + "'");
    }
    skip();
  }
  if (vars.size() != 2) throw InputError("model: term '" + std::string(term) + "' is not quadratic");
  std::sort(vars.begin(), vars.end());
  acc[{vars[0], vars[1]}] += sign * coeff;
}

Quadric parse_quadric(std::string_view line, int genus) {
  std::map<std::pair<int, int>, std::int64_t> acc;
  std::size_t start = 0;
  int sign = 1;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    auto t = trim(line.substr(start, end - start));
    if (t.empty()) throw InputError("model: empty term in '" + std::string(line) + "'");
    parse_term(t, sign, genus, acc);
  };
  // A leading sign belongs to the first term.
  while (i < line.size() && line[i] == ' ') ++i;
  if (i < line.size() && (line[i] == '-' || line[i] == '+')) {
    sign = line[i] == '-' ? -1 : 1;
    ++i;
  }
  start = i;
  for (; i < line.size(); ++i) {
    if (line[i] == '+' || line[i] == '-') {
      flush(i);
      sign = line[i] == '-' ? -1 : 1;
      start = i + 1;
    }
  }
  flush(line.size());
  Quadric q;
  for (auto& [ij, c] : acc)
    if (c != 0) q.terms.push_back({ij.first, ij.second, c});
  if (q.terms.empty()) throw InputError("model: zero quadric");
  return q;
}

}  // namespace

QuadricModel parse_model(std::string_view text) {
  QuadricModel m;
  m.hash = sha256_hex(text);
  std::istringstream is{std::string(text)};
  std::string line;
  std::vector<std::string> body;
  bool have_n = false, have_g = false, have_delta = false;
  while (std::getline(is, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto colon = t.find(':');
    if (colon != std::string::npos && t[0] != 'x' && t[0] != '-' && !std::isdigit(static_cast<unsigned char>(t[0]))) {
      auto key = trim(std::string_view(t).substr(0, colon));
      auto val = trim(std::string_view(t).substr(colon + 1));
      if (key == "label") m.label = val;
      else if (key == "N") { m.level = static_cast<int>(to_int(val, "level")); have_n = true; }
      else if (key == "delta") { m.delta_generators = int_list(val, "generator"); have_delta = true; }
      else if (key == "genus") { m.genus = static_cast<int>(to_int(val, "genus")); have_g = true; }
      else if (key == "good_primes") {
        for (auto p : int_list(val, "prime")) m.good_primes.push_back(static_cast<std::uint32_t>(p));
      } else throw InputError("model: unknown header '" + key + "'");
      continue;
    }
    body.push_back(t);
  }
  if (!have_n || !have_g || !have_delta) throw InputError("model: missing N, genus or delta header");
  if (m.genus < 3) throw InputError("model: genus must be at least 3");
  for (const auto& b : body) m.quadrics.push_back(parse_quadric(b, m.genus));
  const std::size_t expected = static_cast<std::size_t>((m.genus - 2) * (m.genus - 3) / 2);
  if (m.quadrics.size() != expected)
    throw InputError("model: " + std::to_string(m.quadrics.size()) + " quadrics, expected " +
                     std::to_string(expected) + " for genus " + std::to_string(m.genus));
  for (auto p : m.good_primes)
    if (m.level % static_cast<int>(p) == 0)
      throw InputError("model: listed good prime " + std::to_string(p) + " divides the level");
  (void)m.delta();  // validates generators
  return m;
}

QuadricModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string model_file_name(const DirichletSubgroup& delta) {
  std::string s = "x" + std::to_string(delta.level());
  for (int x : delta.elements())
    if (x > 1 && 2 * x <= delta.level()) s += "_" + std::to_string(x);
  return s + ".model";
}

}  // namespace modgon
