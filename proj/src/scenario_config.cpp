#include "trusttoken/scenario_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace trusttoken::config {

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& message)
    : ConfigurationError(fmt::format("{}:{}: {}", source, line, message)),
      source_(std::move(source)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  ScenarioConfig parse() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      auto nl = text_.find('\n', pos);
      auto raw = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      auto line = trim(raw);
      if (!line.empty()) parse_line(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();
    return std::move(cfg_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(source_, line_, message); }
  [[noreturn]] void fail_at(std::size_t line, const std::string& message) const {
    throw ConfigError(source_, line, message);
  }

  template <typename Int>
  Int to_int(std::string_view v, std::string_view what) const {
    Int out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      fail(fmt::format("{} expects an integer, got '{}'", what, v));
    }
    return out;
  }

  double to_double(std::string_view v, std::string_view what) const {
    double out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      fail(fmt::format("{} expects a number, got '{}'", what, v));
    }
    return out;
  }

  AccessAttribute to_attribute(std::string_view v) const {
    auto a = AccessAttribute::parse(v);
    if (!a) fail(fmt::format("bad access attribute '{}'", v));
    return *a;
  }

  std::vector<std::uint8_t> to_bytes(std::string_view hex) const {
    if (hex.starts_with("0x")) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) fail("payload needs an even number of hex digits");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
      std::uint8_t b{};
      auto [p, ec] = std::from_chars(hex.data() + i, hex.data() + i + 2, b, 16);
      if (ec != std::errc() || p != hex.data() + i + 2) fail(fmt::format("bad hex payload '{}'", hex));
      out.push_back(b);
    }
    return out;
  }

  std::pair<std::string_view, std::string_view> key_value(std::string_view line, char sep) const {
    auto eq = line.find(sep);
    if (eq == std::string_view::npos) fail(fmt::format("expected 'key {} value'", sep));
    auto k = trim(line.substr(0, eq));
    auto v = trim(line.substr(eq + 1));
    if (k.empty() || v.empty()) fail(fmt::format("expected 'key {} value'", sep));
    return {k, v};
  }

  std::map<std::string, std::string> options_of(std::span<const std::string_view> words) const {
    std::map<std::string, std::string> out;
    for (auto w : words) {
      auto eq = w.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == w.size()) {
        fail(fmt::format("expected key=value, got '{}'", w));
      }
      if (!out.emplace(std::string(w.substr(0, eq)), std::string(w.substr(eq + 1))).second) {
        fail(fmt::format("option '{}' given twice", w.substr(0, eq)));
      }
    }
    return out;
  }

  void parse_line(std::string_view line) {
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      auto words = split_words(line.substr(1, line.size() - 2));
      if (words.empty()) fail("empty section header");
      section_ = std::string(words[0]);
      if (section_ == "cpu" || section_ == "ip") {
        if (words.size() != 2) fail(fmt::format("[{}] needs exactly one name", section_));
        if (section_ == "cpu") {
          cfg_.topology.cpus.push_back({std::string(words[1]), {}});
        } else {
          if (ip_lines_.contains(std::string(words[1]))) {
            fail(fmt::format("IP '{}' declared twice", words[1]));
          }
          ip_lines_[std::string(words[1])] = line_;
          cfg_.topology.wrapped_ips.push_back({std::string(words[1]), StubKind::kCustom,
                                               IntegrityLevel::kHigh});
        }
      } else if (section_ == "system" || section_ == "puf" || section_ == "map" ||
                 section_ == "policy" || section_ == "script") {
        if (words.size() != 1) fail(fmt::format("[{}] takes no arguments", section_));
      } else {
        fail(fmt::format("unknown section [{}]", section_));
      }
      return;
    }
    if (section_.empty()) fail("content before the first section");
    if (section_ == "system") return parse_system(line);
    if (section_ == "puf") return parse_puf(line);
    if (section_ == "cpu") return parse_cpu(line);
    if (section_ == "ip") return parse_ip(line);
    if (section_ == "map") return parse_map(line);
    if (section_ == "policy") return parse_policy(line);
    parse_script(line);
  }

  void parse_system(std::string_view line) {
    auto [k, v] = key_value(line, '=');
    auto& o = cfg_.options;
    if (k == "name") {
      cfg_.name = std::string(v);
    } else if (k == "mode") {
      auto m = sim::parse_mode(v);
      if (!m) fail(fmt::format("unknown mode '{}'", v));
      o.mode = *m;
    } else if (k == "seed") {
      o.master_seed = to_int<std::uint64_t>(v, k);
    } else if (k == "max_cycles") {
      cfg_.max_cycles = to_int<std::uint64_t>(v, k);
    } else if (k == "handshake_low") {
      o.costs.low = to_int<std::uint32_t>(v, k);
    } else if (k == "handshake_high") {
      o.costs.high = to_int<std::uint32_t>(v, k);
    } else if (k == "strict") {
      if (v != "true" && v != "false") fail("strict expects true or false");
      o.strict_policy = v == "true";
    } else {
      fail(fmt::format("unknown [system] key '{}'", k));
    }
  }

  void parse_puf(std::string_view line) {
    auto [k, v] = key_value(line, '=');
    auto& p = cfg_.options.puf;
    if (k == "oscillators") {
      p.oscillator_count = to_int<std::size_t>(v, k);
    } else if (k == "response_bits") {
      p.response_bits = to_int<std::size_t>(v, k);
    } else if (k == "nominal_frequency") {
      p.nominal_frequency = to_double(v, k);
    } else if (k == "process_variation_sigma") {
      p.process_variation_sigma = to_double(v, k);
    } else if (k == "noise_sigma") {
      p.noise_sigma = to_double(v, k);
    } else {
      fail(fmt::format("unknown [puf] key '{}'", k));
    }
    puf_line_ = line_;
  }

  void parse_cpu(std::string_view line) {
    auto words = split_words(line);
    if (words[0] != "app" || words.size() < 2) fail("expected 'app <name> [user=<name>]'");
    auto opts = options_of(std::span(words).subspan(2));
    std::string name(words[1]);
    std::string user = name;
    for (const auto& [k, v] : opts) {
      if (k != "user") fail(fmt::format("unknown app option '{}'", k));
      user = v;
    }
    if (!app_lines_.emplace(name, line_).second) fail(fmt::format("application '{}' declared twice", name));
    cfg_.topology.cpus.back().apps.push_back({name, user});
  }

  void parse_ip(std::string_view line) {
    auto [k, v] = key_value(line, '=');
    auto& ip = cfg_.topology.wrapped_ips.back();
    if (k == "stub") {
      auto s = parse_stub_kind(v);
      if (!s) fail(fmt::format("unknown stub '{}'", v));
      ip.stub = *s;
    } else if (k == "integrity") {
      auto l = parse_integrity(v);
      if (!l) fail(fmt::format("integrity must be HIGH or LOW, got '{}'", v));
      ip.integrity = *l;
    } else {
      fail(fmt::format("unknown [ip] key '{}'", k));
    }
  }

  void parse_map(std::string_view line) {
    auto arrow = line.find("->");
    std::string_view app;
    std::string_view ip;
    if (arrow != std::string_view::npos) {
      app = trim(line.substr(0, arrow));
      ip = trim(line.substr(arrow + 2));
    } else {
      std::tie(app, ip) = key_value(line, '=');
    }
    if (app.empty() || ip.empty()) fail("expected '<app> = <ip>'");
    if (cfg_.topology.app_to_ip.contains(std::string(app))) {
      fail(fmt::format("application '{}' mapped twice", app));
    }
    cfg_.topology.app_to_ip.emplace(std::string(app), std::string(ip));
    defer_app(app);
    defer_ip(ip);
  }

  void parse_policy(std::string_view line) {
    auto words = split_words(line);
    if (words.size() != 4 || words[0] != "allow") fail("expected 'allow <app> <ip> <rwe>'");
    cfg_.topology.permissions.push_back(
        {std::string(words[1]), std::string(words[2]), to_attribute(words[3])});
    defer_app(words[1]);
    defer_ip(words[2]);
  }

  void parse_script(std::string_view line) {
    auto words = split_words(line);
    if (words.size() < 3 || words[0] != "at") fail("expected 'at <cycle> <action> ...'");
    auto cycle = to_int<std::uint64_t>(words[1], "cycle");
    auto verb = words[2];
    auto rest = std::span(words).subspan(3);

    if (verb == "reprovision") {
      if (!rest.empty()) fail("reprovision takes no arguments");
      cfg_.script.push_back({cycle, sim::ReprovisionIntent{}});
      return;
    }
    if (verb == "access") {
      if (rest.size() < 3) fail("expected 'access <app> <ip> <rwe> [payload=<hex>] [as=<user>]'");
      sim::AccessIntent intent;
      intent.app = std::string(rest[0]);
      intent.target = std::string(rest[1]);
      intent.kind = to_attribute(rest[2]);
      defer_app(intent.app);
      defer_ip(intent.target);
      for (const auto& [k, v] : options_of(rest.subspan(3))) {
        if (k == "payload") {
          intent.payload = to_bytes(v);
        } else if (k == "as") {
          intent.as_user = v;
        } else {
          fail(fmt::format("unknown access option '{}'", k));
        }
      }
      cfg_.script.push_back({cycle, std::move(intent)});
      return;
    }
    if (verb == "attack") {
      if (rest.empty()) fail("expected 'attack <kind> key=value ...'");
      cfg_.script.push_back({cycle, parse_attack(rest[0], options_of(rest.subspan(1)))});
      return;
    }
    fail(fmt::format("unknown script action '{}'", verb));
  }

  sim::AttackInjection parse_attack(std::string_view kind_name,
                                    std::map<std::string, std::string> opts) {
    auto kind = sim::parse_attack_kind(kind_name);
    if (!kind) fail(fmt::format("unknown attack kind '{}'", kind_name));
    sim::AttackInjection a;
    a.kind = *kind;
    a.scenario = take(opts, "scenario").value_or("");
    if (a.scenario.empty()) scenario_defaults_.push_back(cfg_.script.size());

    auto required = [&](const char* key) {
      auto v = take(opts, key);
      if (!v) fail(fmt::format("{} needs {}=", kind_name, key));
      return *v;
    };
    switch (a.kind) {
      case sim::AttackKind::kForgeToken:
      case sim::AttackKind::kCrossIpAccess:
      case sim::AttackKind::kReplayStaleToken:
        a.app = required("app");
        a.target = required("target");
        defer_app(a.app);
        defer_ip(a.target);
        if (auto v = take(opts, "kind")) a.access = to_attribute(*v);
        if (auto v = take(opts, "payload")) a.payload = to_bytes(*v);
        if (a.kind == sim::AttackKind::kForgeToken) {
          if (auto v = take(opts, "bit")) {
            a.flip_bit = to_int<std::size_t>(*v, "bit");
            if (a.flip_bit >= puf::kResponseBits) fail("bit must be in [0, 255]");
          }
        }
        break;
      case sim::AttackKind::kTamperInterconnectSignal: {
        a.signal = required("signal");
        auto dot = a.signal.find('.');
        if (dot == std::string::npos) fail("signal must be <ip>.<awprot|arprot|ar_integrity>");
        auto sig = a.signal.substr(dot + 1);
        if (sig != "awprot" && sig != "arprot" && sig != "ar_integrity") {
          fail(fmt::format("unknown protection signal '{}'", sig));
        }
        defer_ip(a.signal.substr(0, dot));
        break;
      }
      case sim::AttackKind::kTamperIntegrityLevel: {
        a.target = required("target");
        defer_ip(a.target);
        auto level = parse_integrity(required("level"));
        if (!level) fail("level must be HIGH or LOW");
        a.level = *level;
        if (auto v = take(opts, "token")) {
          auto t = sim::parse_token_source(*v);
          if (!t) fail("token must be none, forged or stolen");
          a.token = *t;
        }
        break;
      }
      case sim::AttackKind::kTamperAccessControl:
        a.app = required("app");
        a.target = required("target");
        defer_app(a.app);
        defer_ip(a.target);
        if (auto v = take(opts, "victim")) {
          a.victim = *v;
          defer_app(a.victim);
        }
        if (auto v = take(opts, "attr")) a.access = to_attribute(*v);
        if (auto v = take(opts, "table")) {
          if (*v != "true" && *v != "false") fail("table expects true or false");
          a.table_write = *v == "true";
        }
        break;
    }
    if (!opts.empty()) fail(fmt::format("unknown option '{}' for {}", opts.begin()->first, kind_name));
    return a;
  }

  static std::optional<std::string> take(std::map<std::string, std::string>& opts,
                                         const std::string& key) {
    auto it = opts.find(key);
    if (it == opts.end()) return std::nullopt;
    auto v = it->second;
    opts.erase(it);
    return v;
  }

  void defer_app(std::string_view name) { app_refs_.emplace_back(std::string(name), line_); }
  void defer_ip(std::string_view name) { ip_refs_.emplace_back(std::string(name), line_); }

  void finish() {
    for (const auto& [name, line] : app_refs_) {
      if (!app_lines_.contains(name)) fail_at(line, fmt::format("unknown application '{}'", name));
    }
    for (const auto& [name, line] : ip_refs_) {
      if (!ip_lines_.contains(name)) fail_at(line, fmt::format("unknown IP '{}'", name));
    }
    if (cfg_.name.empty()) cfg_.name = "scenario";
    for (auto i : scenario_defaults_) {
      std::get<sim::AttackInjection>(cfg_.script[i].action).scenario = cfg_.name;
    }
    try {
      cfg_.options.puf.validate();
    } catch (const std::exception& e) {
      fail_at(puf_line_, e.what());
    }
    try {
      cfg_.topology.validate();
    } catch (const ConfigurationError& e) {
      fail_at(line_, e.what());
    }
  }

  std::string_view text_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t puf_line_ = 0;
  std::string section_;
  ScenarioConfig cfg_;
  std::map<std::string, std::size_t> app_lines_;
  std::map<std::string, std::size_t> ip_lines_;
  std::vector<std::pair<std::string, std::size_t>> app_refs_;
  std::vector<std::pair<std::string, std::size_t>> ip_refs_;
  std::vector<std::size_t> scenario_defaults_;
};

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string source) {
  return Parser(text, std::move(source)).parse();
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace trusttoken::config
