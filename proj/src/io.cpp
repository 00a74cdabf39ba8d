#include "linord/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/algorithm/string.hpp>

#include "linord/error.hpp"
#include "linord/predicates.hpp"

namespace linord {

namespace {

struct Line {
  std::size_t number = 0;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line.number) + ": " + what);
}

// Splits "key = value" lines, dropping blank lines and # comments.
std::vector<Line> key_values(std::string_view text) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    boost::algorithm::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    Line line{number, {}, {}};
    if (eq == std::string::npos) fail(line, "expected key = value");
    line.key = boost::algorithm::trim_copy(raw.substr(0, eq));
    line.value = boost::algorithm::trim_copy(raw.substr(eq + 1));
    if (line.key.empty()) fail(line, "missing key");
    out.push_back(std::move(line));
  }
  return out;
}

std::uint64_t number(const Line& line, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    fail(line, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> list(std::string_view text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(", "),
                          boost::algorithm::token_compress_on);
  std::erase_if(parts, [](const std::string& s) { return s.empty(); });
  return parts;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::optional<std::uint64_t> k, ell, window, n;
  std::optional<bool> sound;
  std::vector<UnaryPredicate> predicates;
  bool seen_predicates = false, window_three_ell = false;

  for (const Line& line : key_values(text)) {
    const std::string key = boost::algorithm::to_lower_copy(line.key);
    if (key == "k") {
      k = number(line, line.value);
    } else if (key == "l" || key == "ell") {
      if (line.value != "auto") ell = number(line, line.value);
    } else if (key == "w") {
      window_three_ell = line.value == "3l" || line.value == "3ell";
      if (!window_three_ell) window = number(line, line.value);
    } else if (key == "predicates") {
      seen_predicates = true;
      for (const auto& name : list(line.value)) {
        try {
          predicates.push_back(predicate_by_name(name));
        } catch (const ConfigError& e) {
          fail(line, e.what());
        }
      }
    } else if (key == "n") {
      n = number(line, line.value);
    } else if (key == "mode") {
      if (line.value != "sound" && line.value != "toy") fail(line, "mode must be sound or toy");
      sound = line.value == "sound";
    } else {
      fail(line, "unknown key '" + line.key + "'");
    }
  }

  if (!seen_predicates || predicates.empty()) throw ConfigError("config lists no predicates");
  if (k && *k != predicates.size()) {
    throw ConfigError("k = " + std::to_string(*k) + " but " + std::to_string(predicates.size()) +
                      " predicates are listed");
  }
  if (!window && !window_three_ell) throw ConfigError("config needs w");

  WindowRule rule;
  if (!window_three_ell) rule = {WindowRule::Kind::fixed, *window};
  RunConfig out;
  out.ordb.predicates = std::move(predicates);
  out.ordb.ell = ell ? *ell : min_ell(out.ordb.k(), rule);
  out.ordb.window = rule.window(out.ordb.ell);
  out.ordb.sound = sound.value_or(window_three_ell);
  out.ordb.validate();
  if (n) {
    if (*n > 0xffffffffull) throw ConfigError("n is too large");
    out.n = static_cast<Element>(*n);
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

FiniteStructure parse_structure(std::string_view text, const std::filesystem::path& base_dir) {
  std::optional<std::uint64_t> n;
  std::vector<std::string> builtins;
  std::optional<RunConfig> config;
  std::optional<std::string> word, alphabet;
  struct Adhoc {
    Line line;
    std::string name;
    std::size_t arity;
    std::vector<Tuple> tuples;
  };
  std::vector<Adhoc> adhoc;

  for (const Line& line : key_values(text)) {
    if (line.key == "n") {
      n = number(line, line.value);
    } else if (line.key == "builtins") {
      for (auto& name : list(line.value)) builtins.push_back(std::move(name));
    } else if (line.key == "config") {
      std::filesystem::path p = line.value;
      if (p.is_relative()) p = base_dir / p;
      config = load_config(p);
    } else if (line.key == "word") {
      word = line.value;
    } else if (line.key == "alphabet") {
      alphabet = line.value;
    } else if (boost::algorithm::starts_with(line.key, "relation ")) {
      std::string head = boost::algorithm::trim_copy(line.key.substr(9));
      const auto slash = head.find('/');
      if (slash == std::string::npos) fail(line, "relation needs NAME/ARITY");
      Adhoc rel{line, boost::algorithm::trim_copy(head.substr(0, slash)), 0, {}};
      rel.arity = number(line, boost::algorithm::trim_copy(head.substr(slash + 1)));
      if (rel.name.empty()) fail(line, "relation needs a name");
      std::string body = line.value;
      if (rel.arity == 1 && body.find('(') == std::string::npos) {
        for (const auto& item : list(body)) rel.tuples.push_back({static_cast<Element>(number(line, item))});
      } else {
        std::size_t pos = 0;
        while ((pos = body.find('(', pos)) != std::string::npos) {
          const auto close = body.find(')', pos);
          if (close == std::string::npos) fail(line, "unclosed tuple");
          Tuple t;
          for (const auto& item : list(body.substr(pos + 1, close - pos - 1))) {
            t.push_back(static_cast<Element>(number(line, item)));
          }
          if (t.size() != rel.arity) fail(line, "tuple has the wrong arity");
          rel.tuples.push_back(std::move(t));
          pos = close + 1;
        }
      }
      adhoc.push_back(std::move(rel));
    } else {
      fail(line, "unknown key '" + line.key + "'");
    }
  }

  if (!n && word) n = word->size() - 1;
  if (!n) throw ConfigError("structure needs n or a word");
  if (*n >= 0xffffffffull) throw ConfigError("n is too large");
  const auto dom = static_cast<Element>(*n);
  FiniteStructure s(dom);
  for (const auto& name : builtins) {
    const OrdBConfig* cfg = config ? &config->ordb : nullptr;
    s.add(name, builtin_table(name, dom, cfg));
  }
  for (const auto& rel : adhoc) {
    if (s.has(rel.name)) fail(rel.line, "relation " + rel.name + " is defined twice");
    for (const auto& t : rel.tuples) {
      for (Element x : t) {
        if (x > dom) fail(rel.line, "element " + std::to_string(x) + " is outside [0..n]");
      }
    }
    s.add(rel.name, RelationTable::from_tuples(rel.arity, dom, rel.tuples));
  }
  if (word) {
    if (word->size() != std::uint64_t{dom} + 1) {
      throw ConfigError("word has " + std::to_string(word->size()) + " letters but n + 1 = " +
                        std::to_string(dom + 1));
    }
    std::string letters = alphabet.value_or("");
    if (letters.empty()) {
      std::set<char> seen(word->begin(), word->end());
      letters.assign(seen.begin(), seen.end());
    }
    for (char c : letters) {
      RelationTable q(1, dom);
      for (Element i = 0; i <= dom; ++i) {
        if ((*word)[i] == c) q.insert({i});
      }
      const std::string name = std::string("Q_") + c;
      if (s.has(name)) throw ConfigError("relation " + name + " is defined twice");
      s.add(name, std::move(q));
    }
    for (char c : *word) {
      if (letters.find(c) == std::string::npos) {
        throw ConfigError(std::string("letter '") + c + "' is not in the alphabet");
      }
    }
  }
  return s;
}

FiniteStructure load_structure(const std::filesystem::path& path) {
  return parse_structure(read_file(path), path.parent_path());
}

std::string rank_csv(const OrdBOrder& order) {
  std::string out = "element,rank\n";
  for (Element x = 0; x < order.rank().size(); ++x) {
    out += std::to_string(x) + ',' + std::to_string(order.rank_of(x)) + '\n';
  }
  return out;
}

OrdBOrder parse_rank_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number_of_line = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
  while (std::getline(in, raw)) {
    ++number_of_line;
    boost::algorithm::trim(raw);
    if (raw.empty()) continue;
    Line line{number_of_line, {}, raw};
    if (number_of_line == 1) {
      if (raw != "element,rank") fail(line, "expected header element,rank");
      continue;
    }
    const auto comma = raw.find(',');
    if (comma == std::string::npos) fail(line, "expected element,rank");
    rows.emplace_back(number(line, raw.substr(0, comma)), number(line, raw.substr(comma + 1)));
  }
  if (rows.empty()) throw ConfigError("rank file has no rows");
  std::vector<Element> rank(rows.size(), 0);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [x, r] : rows) {
    if (x >= rows.size() || seen[x]) {
      throw ConfigError("element " + std::to_string(x) + " is missing, repeated or out of range");
    }
    seen[x] = true;
    rank[x] = static_cast<Element>(r);
  }
  try {
    return OrdBOrder(std::move(rank));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rank file: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace linord
