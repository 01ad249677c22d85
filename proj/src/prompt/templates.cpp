#include "spio/embedded_templates.hpp"
#include "spio/prompts.hpp"

namespace spio {

std::string_view template_text(TemplateId id) {
  switch (id) {
    case TemplateId::kCodegen: return embedded::codegen;
    case TemplateId::kPlanning: return embedded::planning;
    case TemplateId::kSelectSingle: return embedded::select_single;
    case TemplateId::kSelectTopK: return embedded::select_topk;
    case TemplateId::kFinalCodegen: return embedded::final_codegen;
  }
  return {};
}

}  // namespace spio
