#include "icdb/store/connector.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "icdb/error.hpp"

namespace icdb::store {

ResultSet parse_batch_output(std::string_view text) {
  ResultSet out;
  auto split = [](std::string_view line) {
    std::vector<Cell> cells;
    std::string cur;
    bool escaped_any = false;
    auto flush = [&] {
      if (!escaped_any && cur == "NULL") {
        cells.emplace_back(std::nullopt);
      } else {
        cells.emplace_back(std::move(cur));
      }
      cur.clear();
      escaped_any = false;
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '\t') {
        flush();
      } else if (c == '\\' && i + 1 < line.size()) {
        const char e = line[++i];
        cur.push_back(e == 't' ? '\t' : e == 'n' ? '\n' : e == '0' ? '\0' : e);
        escaped_any = true;
      } else {
        cur.push_back(c);
      }
    }
    flush();
    return cells;
  };
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    auto cells = split(line);
    if (header) {
      for (auto& c : cells) out.columns.push_back(c.value_or("NULL"));
      header = false;
      continue;
    }
    if (cells.size() != out.columns.size()) {
      throw FormatError(out.rows.size() + 2, "batch output row has " +
                                                 std::to_string(cells.size()) + " fields, expected " +
                                                 std::to_string(out.columns.size()));
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

namespace {

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

class ExecConnector : public Connector {
 public:
  explicit ExecConnector(std::string command) : command_(std::move(command)) {}

  ResultSet execute(std::string_view sql) override {
    char path[] = "/tmp/icdb-sql-XXXXXX";
    const int fd = mkstemp(path);
    if (fd < 0) throw Error("cannot create temporary file for SQL text");
    close(fd);
    struct Cleanup {
      const char* p;
      ~Cleanup() { std::remove(p); }
    } cleanup{path};
    {
      std::ofstream f(path, std::ios::binary);
      f << sql;
      if (!f) throw Error("cannot write SQL text to " + std::string(path));
    }
    const std::string cmd = command_ + " < " + shell_quote(path);
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw Error("cannot run: " + command_);
    std::string output;
    char buf[65536];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    const int status = pclose(pipe);
    if (status != 0) {
      throw Error("external client failed (status " + std::to_string(WEXITSTATUS(status)) +
                  "): " + command_);
    }
    return parse_batch_output(output);
  }

  Capabilities capabilities() const override { return {true, true}; }

 private:
  std::string command_;
};

std::string mysql_command(std::string_view rest) {
  std::string_view creds, hostpart = rest;
  if (auto at = rest.rfind('@'); at != std::string_view::npos) {
    creds = rest.substr(0, at);
    hostpart = rest.substr(at + 1);
  }
  const std::size_t slash = hostpart.find('/');
  if (slash == std::string_view::npos) throw Error("mysql DSN lacks /database");
  const std::string_view hostport = hostpart.substr(0, slash);
  const std::string_view db = hostpart.substr(slash + 1);
  std::string_view host = hostport, port;
  if (auto colon = hostport.rfind(':'); colon != std::string_view::npos) {
    host = hostport.substr(0, colon);
    port = hostport.substr(colon + 1);
  }
  std::string cmd;
  std::string_view user = creds, password;
  if (auto colon = creds.find(':'); colon != std::string_view::npos) {
    user = creds.substr(0, colon);
    password = creds.substr(colon + 1);
  }
  if (!password.empty()) cmd += "MYSQL_PWD=" + shell_quote(password) + " ";
  cmd += "mysql --batch";
  if (!host.empty()) cmd += " -h " + shell_quote(host);
  if (!port.empty()) cmd += " -P " + shell_quote(port);
  if (!user.empty()) cmd += " -u " + shell_quote(user);
  cmd += " " + shell_quote(db);
  return cmd;
}

}  // namespace

std::unique_ptr<Connector> connect(const std::string& dsn) {
  if (dsn.starts_with("exec:")) return std::make_unique<ExecConnector>(dsn.substr(5));
  if (dsn.starts_with("mysql://")) {
    return std::make_unique<ExecConnector>(mysql_command(std::string_view(dsn).substr(8)));
  }
  throw Error("unrecognised DSN '" + dsn + "' (expected exec:<command> or mysql://...)");
}

}  // namespace icdb::store
