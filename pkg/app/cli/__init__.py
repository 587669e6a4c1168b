"""命令行包；入口见 app.cli.main"""
