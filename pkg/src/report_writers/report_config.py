# --- Report layout ---
SCHEMA_VERSION = 1  # bumped whenever a key of the JSON report changes
PARAM_PREFIX = "param."  # flattened verdict parameters in CSV
JSON_INDENT = 2
