"""omra 命令行。"""
