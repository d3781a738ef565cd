//------------------------------------------------------------------------------
//
//   Copyright 2026 The AnchorPact Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "anchorpact/error.hpp"
#include "anchorpact/slc.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace anchorpact::slc {

LegalContractTemplate parse_template(std::string_view document)
{
  LegalContractTemplate out;
  try
  {
    auto const root = YAML::Load(std::string{document});
    out.name        = root["name"].as<std::string>();
    out.text        = root["text"].as<std::string>();
    for (auto const &node : root["placeholders"])
    {
      out.placeholders.push_back({node["name"].as<std::string>(), node["type"].as<std::string>()});
    }
    for (auto const &node : root["clauses"])
    {
      ClauseSpec c;
      c.id                  = node["id"].as<std::string>();
      c.title               = node["title"].as<std::string>();
      c.logic               = node["logic"].as<std::string>();
      c.completion_required = node["completion_required"].as<bool>(false);
      c.oracle_may_enforce  = node["oracle_may_enforce"].as<bool>(false);
      for (auto const &param : node["parameters"])
      {
        c.parameters.push_back({param["name"].as<std::string>(), param["type"].as<std::string>()});
      }
      out.clauses.push_back(std::move(c));
    }
  }
  catch (YAML::Exception const &e)
  {
    throw Error(Errc::TemplateError, e.what());
  }
  out.validate();
  return out;
}

LegalContractTemplate load_template(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(Errc::TemplateError, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_template(buffer.str());
}

}  // namespace anchorpact::slc
