#pragma once

#include <sys/types.h>

#include <string>
#include <vector>

#include "hegel/entail.hpp"

namespace hegel {

// Declarations and assertions without logic selection or check-sat.
std::string encode_body(const EntailmentQuery& q, const std::vector<PredDecl>& preds,
                        const std::vector<QualP>& axioms);

// A long-lived SMT-LIB2 solver child speaking over pipes.
class SmtProcess {
 public:
  SmtProcess(const std::string& cmd, int timeoutMs);
  ~SmtProcess();
  SmtProcess(const SmtProcess&) = delete;
  SmtProcess& operator=(const SmtProcess&) = delete;

  // Runs body inside push/pop and returns the first answer line.
  std::string run(const std::string& body);

 private:
  void send(const std::string& text);
  std::vector<std::string> read_until(const std::string& marker);

  pid_t pid_ = -1;
  int toSolver_ = -1;
  int fromSolver_ = -1;
  int timeoutMs_;
  std::string buffer_;
};

}  // namespace hegel
