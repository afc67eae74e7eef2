import typer


def create_app(config_class):
    """
    Creates and configures the hhk command line application.
    Every subcommand reads its defaults from config_class.
    """
    app = typer.Typer(
        name="hhk",
        help="Hedgehog geometry and verification of the C2 counterexample surface.",
        no_args_is_help=True,
        add_completion=False,
    )

    from .commands import register_commands
    register_commands(app, config_class)

    return app
