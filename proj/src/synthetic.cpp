#include "toolkg/synthetic.hpp"

#include <algorithm>
#include <random>

namespace toolkg {

namespace {

struct Attribute {
  const char* name;
  const char* value_type;
};

struct ObjectDef {
  const char* name;
  const char* line_of_business;
  const char* department;
  const char* parent;  // item objects hang off a header object
  std::vector<const char*> refs;
  std::vector<Attribute> attributes;
};

const std::vector<ObjectDef>& objects() {
  static const std::vector<ObjectDef> kObjects = {
      {"purchase requisition", "Procurement", "Purchasing", nullptr, {},
       {{"status", "enum [open, approved, rejected]"}, {"delivery_date", "date"}}},
      {"purchase requisition item", "Procurement", "Purchasing", "purchase requisition", {},
       {{"quantity", "number"}, {"material", "string"}}},
      {"purchase order", "Procurement", "Purchasing", nullptr, {"supplier"},
       {{"status", "enum [pending, released, closed]"}, {"net_amount", "decimal"}}},
      {"purchase order item", "Procurement", "Purchasing", "purchase order", {},
       {{"quantity", "number"}, {"net_price", "decimal"}}},
      {"supplier", "Procurement", "Vendor Management", nullptr, {},
       {{"rating", "enum [A, B, C]"}, {"country", "string"}}},
      {"supplier invoice", "Finance", "Accounts Payable", nullptr, {"purchase order"},
       {{"gross_amount", "decimal"}, {"due_date", "date"}}},
      {"goods receipt", "Logistics", "Warehouse", nullptr, {"purchase order"},
       {{"posting_date", "date"}, {"received_quantity", "number"}}},
      {"sales order", "Sales", "Order Management", nullptr, {"customer"},
       {{"status", "enum [open, confirmed, shipped]"}, {"net_amount", "decimal"}}},
      {"sales order item", "Sales", "Order Management", "sales order", {},
       {{"quantity", "number"}, {"product", "string"}}},
      {"customer", "Sales", "Customer Service", nullptr, {},
       {{"credit_limit", "decimal"}, {"region", "string"}}},
      {"outbound delivery", "Logistics", "Shipping", nullptr, {"sales order"},
       {{"ship_date", "date"}, {"carrier", "string"}}},
      {"billing document", "Finance", "Accounts Receivable", nullptr, {"sales order"},
       {{"billing_amount", "decimal"}, {"billing_date", "date"}}},
      {"sales quotation", "Sales", "Presales", nullptr, {"customer"},
       {{"valid_to_date", "date"}, {"discount_percent", "number"}}},
      {"expense report", "Finance", "Travel and Expense", nullptr, {"employee"},
       {{"transaction_amount", "decimal"}, {"transaction_date", "date"}}},
      {"journal entry", "Finance", "General Ledger", nullptr, {"cost center"},
       {{"posting_date", "date"}, {"amount", "decimal"}}},
      {"cost center", "Finance", "Controlling", nullptr, {},
       {{"budget", "decimal"}, {"manager", "string"}}},
      {"payment", "Finance", "Accounts Payable", nullptr, {"supplier invoice"},
       {{"payment_date", "date"}, {"paid_amount", "decimal"}}},
      {"employee", "Human Resources", "People Operations", nullptr, {},
       {{"job_title", "string"}, {"location", "string"}}},
      {"leave request", "Human Resources", "People Operations", nullptr, {"employee"},
       {{"start_date", "date"}, {"status", "enum [submitted, approved, declined]"}}},
      {"timesheet", "Human Resources", "Payroll", nullptr, {"employee"},
       {{"recorded_hours", "number"}, {"week", "string"}}},
      {"spot award", "Human Resources", "Rewards", nullptr, {"employee"},
       {{"award_amount", "decimal"}, {"reason", "string"}}},
      {"service ticket", "Service", "Support", nullptr, {"customer"},
       {{"priority", "enum [high, medium, low]"}, {"status", "enum [new, in progress, solved]"}}},
      {"maintenance order", "Service", "Plant Maintenance", nullptr, {},
       {{"priority", "enum [high, medium, low]"}, {"due_date", "date"}}},
  };
  return kObjects;
}

std::string snake(std::string_view words) {
  std::string out(words);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string title_case(std::string_view words) {
  std::string out(words);
  bool start = true;
  for (char& c : out) {
    if (start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = c == ' ';
  }
  return out;
}

std::string spaced(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

ParameterSpec id_param(std::string_view object) {
  return {snake(object) + "_id", "Identifier of the " + std::string(object) + ".", "string"};
}

const char* capability(std::string_view verb) {
  if (verb == "read") return "details";
  if (verb == "query") return "search";
  if (verb == "update") return "maintenance";
  if (verb == "create") return "creation";
  if (verb == "delete") return "deletion";
  if (verb == "approve") return "approval";
  return "overview";
}

ToolSpec make_tool(const ObjectDef& obj, std::string_view verb) {
  const std::string name = obj.name;
  ToolSpec tool;
  tool.tool_id = std::string(verb) + "_" + snake(name);
  tool.title = title_case(std::string(verb) + " " + name);
  tool.metadata = {{"business_object", name},
                   {"line_of_business", obj.line_of_business},
                   {"department", obj.department},
                   {"capability", capability(verb)}};
  auto& params = tool.parameters;
  auto add_context_ids = [&] {
    if (obj.parent) params.push_back(id_param(obj.parent));
    for (const auto* r : obj.refs) params.push_back(id_param(r));
  };
  if (verb == "read") {
    tool.description = "Displays the details of a " + name + " identified by its ID.";
    if (obj.parent) params.push_back(id_param(obj.parent));
    params.push_back(id_param(name));
  } else if (verb == "query") {
    tool.description = "Searches " + name + " records by their attributes and returns the matches.";
    add_context_ids();
    for (const auto& a : obj.attributes) {
      params.push_back({a.name, "Filter on the " + spaced(a.name) + " of the " + name + ".", a.value_type});
    }
  } else if (verb == "update") {
    const auto& a = obj.attributes.front();
    tool.description = "Changes the " + spaced(a.name) + " of an existing " + name + ".";
    params.push_back(id_param(name));
    params.push_back({a.name, "New " + spaced(a.name) + " for the " + name + ".", a.value_type});
  } else if (verb == "create") {
    tool.description = "Registers a new " + name +
                       (obj.parent ? " under an existing " + std::string(obj.parent) : std::string()) + ".";
    add_context_ids();
    for (const auto& a : obj.attributes) {
      params.push_back({a.name, "Initial " + spaced(a.name) + " of the new " + name + ".", a.value_type});
    }
  } else if (verb == "delete") {
    tool.description = "Removes a " + name + " that is no longer needed.";
    params.push_back(id_param(name));
  } else if (verb == "approve") {
    tool.description = "Approves a " + name + " that is waiting for a decision.";
    params.push_back(id_param(name));
    params.push_back({"approval_note", "Comment stored with the decision.", "string"});
  } else {
    tool.description = "Lists every " + name +
                       (obj.parent ? " that belongs to a given " + std::string(obj.parent) : std::string()) + ".";
    add_context_ids();
    params.push_back({"max_results", "Upper bound on the number of returned entries.", "integer"});
  }
  return tool;
}

}  // namespace

Catalog make_synthetic_catalog(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Catalog catalog;
  catalog.source_path = "synthetic:" + std::to_string(seed);
  static const char* kOptional[] = {"create", "delete", "approve", "list"};
  for (const auto& obj : objects()) {
    std::vector<std::string> verbs = {"read", "query", "update"};
    for (const auto* v : kOptional) {
      if (rng() % 2 == 0) verbs.push_back(v);
    }
    for (const auto& v : verbs) catalog.tools.push_back(make_tool(obj, v));
  }
  std::sort(catalog.tools.begin(), catalog.tools.end(),
            [](const ToolSpec& a, const ToolSpec& b) { return a.tool_id < b.tool_id; });
  return catalog;
}

QueryGenConfig synthetic_benchmark_config(std::uint64_t seed) {
  QueryGenConfig config;
  config.seed = seed;
  config.max_len = 3;
  config.max_paths = 240;
  for (auto c : kAllQueryClasses) config.class_targets[c] = 30;
  return config;
}

}  // namespace toolkg
