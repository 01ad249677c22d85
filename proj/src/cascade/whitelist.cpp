#include "spio/whitelist.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

// sys.stdlib_module_names (CPython 3.10), public names only.
constexpr std::string_view kStdlib[] = {
    "abc", "aifc", "antigravity", "argparse", "array", "ast", "asynchat", "asyncio", "asyncore",
    "atexit", "audioop", "base64", "bdb", "binascii", "binhex", "bisect", "builtins", "bz2",
    "cProfile", "calendar", "cgi", "cgitb", "chunk", "cmath", "cmd", "code", "codecs", "codeop",
    "collections", "colorsys", "compileall", "concurrent", "configparser", "contextlib",
    "contextvars", "copy", "copyreg", "crypt", "csv", "ctypes", "curses", "dataclasses",
    "datetime", "dbm", "decimal", "difflib", "dis", "distutils", "doctest", "email", "encodings",
    "ensurepip", "enum", "errno", "faulthandler", "fcntl", "filecmp", "fileinput", "fnmatch",
    "fractions", "ftplib", "functools", "gc", "genericpath", "getopt", "getpass", "gettext",
    "glob", "graphlib", "grp", "gzip", "hashlib", "heapq", "hmac", "html", "http", "idlelib",
    "imaplib", "imghdr", "imp", "importlib", "inspect", "io", "ipaddress", "itertools", "json",
    "keyword", "lib2to3", "linecache", "locale", "logging", "lzma", "mailbox", "mailcap",
    "marshal", "math", "mimetypes", "mmap", "modulefinder", "msilib", "msvcrt",
    "multiprocessing", "netrc", "nis", "nntplib", "nt", "ntpath", "nturl2path", "numbers",
    "opcode", "operator", "optparse", "os", "ossaudiodev", "pathlib", "pdb", "pickle",
    "pickletools", "pipes", "pkgutil", "platform", "plistlib", "poplib", "posix", "posixpath",
    "pprint", "profile", "pstats", "pty", "pwd", "py_compile", "pyclbr", "pydoc", "pydoc_data",
    "pyexpat", "queue", "quopri", "random", "re", "readline", "reprlib", "resource",
    "rlcompleter", "runpy", "sched", "secrets", "select", "selectors", "shelve", "shlex",
    "shutil", "signal", "site", "smtpd", "smtplib", "sndhdr", "socket", "socketserver", "spwd",
    "sqlite3", "sre_compile", "sre_constants", "sre_parse", "ssl", "stat", "statistics",
    "string", "stringprep", "struct", "subprocess", "sunau", "symtable", "sys", "sysconfig",
    "syslog", "tabnanny", "tarfile", "telnetlib", "tempfile", "termios", "textwrap", "this",
    "threading", "time", "timeit", "tkinter", "token", "tokenize", "trace", "traceback",
    "tracemalloc", "tty", "turtle", "turtledemo", "types", "typing", "unicodedata", "unittest",
    "urllib", "uu", "uuid", "venv", "warnings", "wave", "weakref", "webbrowser", "winreg",
    "winsound", "wsgiref", "xdrlib", "xml", "xmlrpc", "zipapp", "zipfile", "zipimport", "zlib",
    "zoneinfo", "__future__",
};

AllowSet members(std::initializer_list<std::string_view> modules,
                 std::initializer_list<std::pair<std::string_view, std::initializer_list<std::string_view>>> entries) {
  AllowSet set;
  for (auto m : modules) set.modules.emplace(m);
  for (const auto& [module, names] : entries) {
    for (auto n : names) set.members.insert(std::string(module) + ":" + std::string(n));
  }
  return set;
}

std::string root_of(std::string_view dotted) {
  return std::string(dotted.substr(0, dotted.find('.')));
}

class Checker {
 public:
  Checker(StageId stage, const AllowSet& allow) : stage_(stage), allow_(allow) {}

  bool whole(std::string_view path) const {
    if (is_stdlib_module(root_of(path))) return true;
    for (const auto& m : allow_.modules) {
      if (path == m || (path.size() > m.size() && path.starts_with(m) && path[m.size()] == '.')) return true;
    }
    return false;
  }

  // Some allowed member lives in `path` or below it.
  bool package_prefix(std::string_view path) const {
    for (const auto& entry : allow_.members) {
      const std::string_view module = std::string_view(entry).substr(0, entry.find(':'));
      if (module == path || (module.size() > path.size() && module.starts_with(path) && module[path.size()] == '.')) {
        return true;
      }
    }
    return false;
  }

  bool member(std::string_view module, std::string_view name) const {
    return allow_.members.contains(std::string(module) + ":" + std::string(name));
  }

  void import_module(const std::string& path, const std::string& alias, int line) {
    if (whole(path)) return;
    if (!package_prefix(path)) {
      report(path, line);
      return;
    }
    aliases_[alias] = path;
  }

  void import_from(const std::string& module, const std::string& name, const std::string& alias, int line) {
    if (whole(module)) return;
    if (name == "*") {
      report(module + ".*", line);
      return;
    }
    if (member(module, name)) return;
    const std::string sub = module + "." + name;
    if (package_prefix(sub)) {
      aliases_[alias] = sub;
      return;
    }
    report(sub, line);
  }

  void dynamic_import(const std::string& path, int line) {
    if (!whole(path) && !package_prefix(path)) report(path, line);
  }

  // `chain` is a dotted reference whose first component may be an alias.
  void attribute_chain(std::string_view chain, int line) {
    const auto dot = chain.find('.');
    const auto it = aliases_.find(std::string(chain.substr(0, dot)));
    if (it == aliases_.end() || dot == std::string_view::npos) return;
    std::vector<std::string> parts;
    std::string module = it->second;
    std::string_view rest = chain.substr(dot + 1);
    while (!rest.empty()) {
      const auto next = rest.find('.');
      parts.emplace_back(rest.substr(0, next));
      rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
    }
    for (const auto& name : parts) {
      if (whole(module) || member(module, name)) return;
      const std::string sub = module + "." + name;
      if (!package_prefix(sub)) {
        report(sub, line);
        return;
      }
      module = sub;
    }
  }

  void report(const std::string& identifier, int line) {
    WhitelistViolation v{stage_, identifier, line};
    if (std::find(violations_.begin(), violations_.end(), v) == violations_.end()) violations_.push_back(v);
  }

  std::vector<WhitelistViolation> take() { return std::move(violations_); }

 private:
  StageId stage_;
  const AllowSet& allow_;
  std::map<std::string, std::string> aliases_;
  std::vector<WhitelistViolation> violations_;
};

struct LogicalLine {
  std::string text;  // comments removed, string literals replaced by placeholders
  int line = 1;
};

struct Lexed {
  std::vector<LogicalLine> lines;
  std::vector<std::string> strings;
  bool ok = true;
};

bool is_prefix_char(char c) {
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return c == 'r' || c == 'b' || c == 'f' || c == 'u';
}

// Joins bracket and backslash continuations and masks strings and comments.
Lexed lex(std::string_view code) {
  Lexed out;
  LogicalLine current;
  int physical = 1;
  int depth = 0;
  bool continuation = false;
  std::size_t i = 0;
  auto flush = [&] {
    if (!trim(current.text).empty()) out.lines.push_back(current);
    current = LogicalLine{};
  };
  current.line = 1;
  while (i < code.size()) {
    const char c = code[i];
    if (c == '#') {
      while (i < code.size() && code[i] != '\n') ++i;
      continue;
    }
    if (c == '\\' && i + 1 < code.size() && code[i + 1] == '\n') {
      i += 2;
      ++physical;
      current.text.push_back(' ');
      continue;
    }
    if (c == '\'' || c == '"') {
      // drop string prefix letters already emitted (r"", f"", ...)
      while (!current.text.empty() && is_prefix_char(current.text.back()) &&
             (current.text.size() == 1 || !std::isalnum(static_cast<unsigned char>(current.text[current.text.size() - 2])))) {
        current.text.pop_back();
      }
      const bool triple = i + 2 < code.size() && code[i + 1] == c && code[i + 2] == c;
      const std::string_view delim = triple ? code.substr(i, 3) : code.substr(i, 1);
      std::size_t j = i + delim.size();
      std::string content;
      bool closed = false;
      while (j < code.size()) {
        if (code[j] == '\\' && j + 1 < code.size()) {
          content.push_back(code[j + 1]);
          if (code[j + 1] == '\n') ++physical;
          j += 2;
          continue;
        }
        if (code.substr(j, delim.size()) == delim) {
          closed = true;
          j += delim.size();
          break;
        }
        if (code[j] == '\n') {
          if (!triple) break;
          ++physical;
        }
        content.push_back(code[j]);
        ++j;
      }
      if (!closed) {
        out.ok = false;
        return out;
      }
      current.text += " __str" + std::to_string(out.strings.size()) + "__ ";
      out.strings.push_back(std::move(content));
      i = j;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
    if (c == '\n') {
      ++physical;
      ++i;
      if (depth > 0) {
        current.text.push_back(' ');
        continue;
      }
      flush();
      current.line = physical;
      continue;
    }
    if (current.text.empty() && !trim(std::string_view(&c, 1)).empty()) current.line = physical;
    current.text.push_back(c);
    ++i;
  }
  (void)continuation;
  if (depth > 0) out.ok = false;
  flush();
  return out;
}

std::vector<std::string> split_statements(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ';') {
      const auto stmt = trim(std::string_view(text).substr(start, i - start));
      if (!stmt.empty()) out.emplace_back(stmt);
      start = i + 1;
    }
  }
  return out;
}

void scan_statement(Checker& checker, const std::string& stmt, int line,
                    const std::vector<std::string>& strings) {
  static const std::regex kImport(R"(^import\s+(.+)$)");
  static const std::regex kFrom(R"(^from\s+(\.*[\w\.]*)\s+import\s+(.+)$)");
  static const std::regex kAsName(R"(^([\w\.\*]+)(?:\s+as\s+(\w+))?$)");
  static const std::regex kDynamic(R"((__import__|import_module)\s*\(\s*__str(\d+)__)");
  static const std::regex kChain(R"(([A-Za-z_]\w*)((?:\s*\.\s*[A-Za-z_]\w*)+))");

  std::smatch m;
  if (std::regex_match(stmt, m, kImport)) {
    std::string list = m[1].str();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= list.size(); ++i) {
      if (i != list.size() && list[i] != ',') continue;
      const std::string item(trim(std::string_view(list).substr(start, i - start)));
      start = i + 1;
      std::smatch a;
      if (!std::regex_match(item, a, kAsName)) continue;
      const std::string path = a[1].str();
      const std::string alias = a[2].matched ? a[2].str() : root_of(path);
      // `import a.b` binds `a`; attribute chains then start from the root.
      checker.import_module(path, alias, line);
      if (!a[2].matched && path.find('.') != std::string::npos) checker.import_module(root_of(path), alias, line);
    }
    return;
  }
  if (std::regex_match(stmt, m, kFrom)) {
    const std::string module = m[1].str();
    if (module.empty() || module.front() == '.') return;  // relative import: local code
    std::string names = m[2].str();
    std::erase_if(names, [](char ch) { return ch == '(' || ch == ')'; });
    std::size_t start = 0;
    for (std::size_t i = 0; i <= names.size(); ++i) {
      if (i != names.size() && names[i] != ',') continue;
      const std::string item(trim(std::string_view(names).substr(start, i - start)));
      start = i + 1;
      std::smatch a;
      if (item.empty() || !std::regex_match(item, a, kAsName)) continue;
      const std::string name = a[1].str();
      checker.import_from(module, name, a[2].matched ? a[2].str() : name, line);
    }
    return;
  }
  for (auto it = std::sregex_iterator(stmt.begin(), stmt.end(), kDynamic); it != std::sregex_iterator(); ++it) {
    const auto idx = static_cast<std::size_t>(std::stoul((*it)[2].str()));
    if (idx < strings.size()) checker.dynamic_import(std::string(trim(strings[idx])), line);
  }
  for (auto it = std::sregex_iterator(stmt.begin(), stmt.end(), kChain); it != std::sregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position(0));
    // skip chains that are themselves attributes of something else
    std::size_t p = pos;
    while (p > 0 && std::isspace(static_cast<unsigned char>(stmt[p - 1]))) --p;
    if (p > 0 && stmt[p - 1] == '.') continue;
    std::string chain = (*it)[0].str();
    std::erase_if(chain, [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
    checker.attribute_chain(chain, line);
  }
}

}  // namespace

AllowSet& AllowSet::merge(const AllowSet& other) {
  modules.insert(other.modules.begin(), other.modules.end());
  members.insert(other.members.begin(), other.members.end());
  return *this;
}

bool is_stdlib_module(std::string_view root) {
  return std::find(std::begin(kStdlib), std::end(kStdlib), root) != std::end(kStdlib);
}

Whitelist default_whitelist() {
  Whitelist w;
  w[stage_index(StageId::kPreprocess)] = members({"numpy", "pandas"}, {});
  w[stage_index(StageId::kFeatureEngineering)] = members(
      {"numpy", "pandas", "warnings"},
      {{"sklearn.impute", {"SimpleImputer"}},
       {"sklearn.preprocessing",
        {"LabelEncoder", "MinMaxScaler", "PolynomialFeatures", "RobustScaler", "StandardScaler"}}});
  w[stage_index(StageId::kModelSelection)] = members(
      {"numpy", "pandas"},
      {{"sklearn.compose", {"ColumnTransformer"}},
       {"sklearn.ensemble", {"GradientBoostingRegressor", "RandomForestClassifier", "RandomForestRegressor"}},
       {"sklearn.impute", {"SimpleImputer"}},
       {"sklearn.linear_model", {"Lasso", "LinearRegression", "LogisticRegression", "Ridge"}},
       {"sklearn.metrics",
        {"accuracy_score", "classification_report", "mean_absolute_error", "mean_squared_error",
         "r2_score", "roc_auc_score"}},
       {"sklearn.model_selection", {"train_test_split"}},
       {"sklearn.multioutput", {"MultiOutputClassifier"}},
       {"sklearn.pipeline", {"Pipeline"}},
       {"sklearn.preprocessing", {"LabelEncoder", "OneHotEncoder", "StandardScaler"}}});
  // Tuning may use everything above plus the search and extra model classes.
  AllowSet tuning;
  tuning.merge(w[0]).merge(w[1]).merge(w[2]);
  tuning.merge(members({}, {{"sklearn.model_selection", {"GridSearchCV"}},
                            {"sklearn.svm", {"SVC"}},
                            {"xgboost", {"XGBClassifier"}}}));
  w[stage_index(StageId::kHyperparameterTuning)] = std::move(tuning);
  return w;
}

AllowSet union_allow_set(const Whitelist& whitelist) {
  AllowSet all;
  for (const auto& set : whitelist) all.merge(set);
  return all;
}

WhitelistReport check_whitelist(std::string_view code, StageId stage, const AllowSet& allow) {
  if (trim(code).empty()) fail(ErrorCode::kInvalidArgument, "code is empty");
  Checker checker(stage, allow);
  WhitelistReport report;
  const Lexed lexed = lex(code);
  if (lexed.ok) {
    for (const auto& logical : lexed.lines) {
      for (const auto& stmt : split_statements(logical.text)) {
        scan_statement(checker, stmt, logical.line, lexed.strings);
      }
    }
  } else {
    report.fallback_scan = true;
    int number = 0;
    for (auto raw : split_lines(code)) {
      ++number;
      std::string line(raw.substr(0, raw.find('#')));
      for (const auto& stmt : split_statements(line)) scan_statement(checker, stmt, number, {});
    }
  }
  report.violations = checker.take();
  return report;
}

WhitelistReport check_whitelist(std::string_view code, StageId stage, const Whitelist& whitelist) {
  return check_whitelist(code, stage, whitelist[stage_index(stage)]);
}

}  // namespace spio
