from .helper import format_table, format_value, load_json, to_jsonable, write_json

__all__ = ['format_table', 'format_value', 'load_json', 'to_jsonable', 'write_json']
